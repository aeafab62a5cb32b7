//! Planning and simulation of edge-cloud split inference for promptable
//! segmentation pipelines.
//!
//! The crate decides where to cut the image encoder and the image-prompt
//! encoder between an edge device and a cloud server, which input
//! resolutions to use, and how to shrink the set of visual prompts before
//! decoding, so that a latency budget holds while profiled accuracy is as
//! high as possible. A small discrete-event simulator replays the resulting
//! plans over bandwidth traces and compares them with baseline policies.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod graph;
pub mod maxflow;
pub mod netsim;
pub mod partition;
pub mod prompt;
pub mod reference;
pub mod seed;
pub mod sero;
pub mod sim;

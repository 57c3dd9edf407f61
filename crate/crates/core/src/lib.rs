//! Optimal-access MDS array codes.
//!
//! An `(n, k, l)` array code stores `l` symbols per node. Parity is defined by
//! `r = n - k` block equations `sum_i A_{t,i} c_i = 0` with sparse `l x l`
//! matrices built from digit addresses. Any `r` erasures are decodable, and a
//! single failed node is rebuilt while reading only `l / s` symbols from each
//! helper.
//!
//! Entry points:
//! - [`field`]: prime and binary extension fields.
//! - [`code`]: parameters and the implicit parity matrices.
//! - [`codec`]: encoding, syndromes and erasure decoding.
//! - [`repair`]: repair planning, execution and access accounting.
//! - [`verify`]: MDS certificates and structural checks.
//! - [`storage`]: striping bytes into codewords and chunk files.
//! - [`cli`]: the `oamds` command line.

pub mod cli;
pub mod code;
pub mod codec;
pub mod error;
pub mod field;
pub mod linalg;
pub mod repair;
pub mod storage;
pub mod verify;

pub use code::{CodeParams, CodeSpec, Construction};
pub use codec::{decode, encode, Codeword, ErasurePattern};
pub use error::{Error, Result};
pub use field::{Field, FieldElement, FieldSpec};
pub use repair::{plan_full_repair, plan_group_repair, RepairMode, RepairPlan};

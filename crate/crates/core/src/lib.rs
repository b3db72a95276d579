//! Context-oriented programming toolkit.
//!
//! * [`layer`], [`table`], [`dispatch`]: layer identity and proceed-chain
//!   dispatch of layered methods.
//! * [`ctx`]: per-thread layer activation (`with`/`without`/`end`).
//! * [`codegen`]: scanner for the layered-source convention language and the
//!   template-driven shim generator.
//! * [`bench`]: dispatch overhead measurements.
//! * [`cli`]: the commands behind the `layerctx` binary.

pub mod bench;
pub mod cli;
pub mod codegen;
pub mod ctx;
pub mod demo;
pub mod dispatch;
pub mod layer;
pub mod table;

pub use ctx::{ActivationError, ContextStack, Frame, FrameKind};
pub use dispatch::{table_lookups, DispatchChain, Method, Proceed};
pub use layer::{register_layer, LayerError, LayerId};
pub use table::{DispatchError, DispatchTable, MethodKey, TableBuilder, TableError};

//! A small reduced ordered binary decision diagram (ROBDD) package.
//!
//! Nodes live in a single hash-consed store owned by a [`BddManager`]; two
//! handles are equal exactly when they denote the same boolean function. The
//! variable order is fixed when the manager is created. There are no complement
//! edges and no garbage collector: the store only grows, except through the
//! explicit [`BddManager::mark`] / [`BddManager::rollback`] scratch regions that
//! the execution engines use to discard per-step intermediate results.

mod dot;
mod manager;
mod memo;
mod ops;
mod sat;

pub use manager::{Bdd, BddError, BddManager, Mark, Var, VarOrder};
pub use ops::Op;

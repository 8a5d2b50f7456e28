#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod binding;
pub mod hfset;
pub mod infer1;
pub mod semantics1;
pub mod syntax;
pub mod infer2;
pub mod speclib;
pub mod system2;

#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod logic;
pub mod numeric;
pub mod runtime;
pub mod compiler;
pub mod parikh;

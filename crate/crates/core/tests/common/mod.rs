//! Helpers shared by the integration tests.

#![allow(dead_code)]

pub mod golden;
pub mod lasso_oracle;
pub mod order;
pub mod size_family;

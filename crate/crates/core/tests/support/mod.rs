#![allow(dead_code)]

pub mod katan_oracle;
pub mod present_ref;

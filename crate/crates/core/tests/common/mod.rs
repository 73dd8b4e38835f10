#![allow(dead_code)]

pub mod riemann;

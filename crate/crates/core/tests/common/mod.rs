#![allow(dead_code)]

pub mod fanger_reference;

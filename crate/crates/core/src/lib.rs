pub mod density;
pub mod detect;
pub mod graph;
pub mod lab;
pub mod rep;
pub mod sim;

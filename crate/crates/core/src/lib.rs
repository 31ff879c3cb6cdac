pub mod poly;
pub mod cluster;
pub mod surface;
pub mod snake;
pub mod linalg;
pub mod fixtures;
pub mod repalg;
pub mod verify;
pub mod render;
pub mod cli;

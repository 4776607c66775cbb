//! Command-line surface.

pub fn run() -> i32 {
    0
}

//! Canonical design arrays stored verbatim.

/// The 12-run Plackett–Burman design, x1..x11.
pub const PB12: [[i8; 11]; 12] = [
    [-1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1],
    [-1, -1, -1, -1, -1, 1, 1, 1, 1, 1, 1],
    [-1, -1, 1, 1, 1, -1, -1, -1, 1, 1, 1],
    [-1, 1, -1, 1, 1, -1, 1, 1, -1, -1, 1],
    [-1, 1, 1, -1, 1, 1, -1, 1, -1, 1, -1],
    [-1, 1, 1, 1, -1, 1, 1, -1, 1, -1, -1],
    [1, -1, 1, 1, -1, -1, 1, 1, -1, 1, -1],
    [1, -1, 1, -1, 1, 1, 1, -1, -1, -1, 1],
    [1, -1, -1, 1, 1, 1, -1, 1, 1, -1, -1],
    [1, 1, 1, -1, -1, -1, -1, 1, 1, -1, 1],
    [1, 1, -1, 1, -1, 1, -1, -1, -1, 1, 1],
    [1, 1, -1, -1, 1, -1, 1, -1, 1, 1, -1],
];

/// The definitive screening design for six variables (13 runs).
pub const DSD6: [[i8; 6]; 13] = [
    [0, 1, -1, -1, -1, -1],
    [0, -1, 1, 1, 1, 1],
    [1, 0, -1, 1, 1, -1],
    [-1, 0, 1, -1, -1, 1],
    [-1, -1, 0, 1, -1, -1],
    [1, 1, 0, -1, 1, 1],
    [-1, 1, 1, 0, 1, -1],
    [1, -1, -1, 0, -1, 1],
    [1, -1, 1, -1, 0, -1],
    [-1, 1, -1, 1, 0, 1],
    [1, 1, 1, 1, -1, 0],
    [-1, -1, -1, -1, 1, 0],
    [0, 0, 0, 0, 0, 0],
];

pub(crate) fn to_rows<const D: usize>(t: &[[i8; D]]) -> Vec<Vec<i32>> {
    t.iter().map(|r| r.iter().map(|&v| v as i32).collect()).collect()
}

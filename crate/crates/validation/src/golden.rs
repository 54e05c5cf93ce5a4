//! Design tables typed in by hand from the published arrays. They are the
//! oracles the constructors are compared against.

/// The 2^(4−1) fraction with I = x1x2x3x4, runs in standard order.
pub const HALF_FRACTION_4: [[i8; 4]; 8] = [
    [-1, -1, -1, -1],
    [-1, -1, 1, 1],
    [-1, 1, -1, 1],
    [-1, 1, 1, -1],
    [1, -1, -1, 1],
    [1, -1, 1, -1],
    [1, 1, -1, -1],
    [1, 1, 1, 1],
];

/// Alias pairs of the half fraction, as 1-based variable lists.
pub const HALF_FRACTION_4_ALIASES: [(&[usize], &[usize]); 7] = [
    (&[1], &[2, 3, 4]),
    (&[2], &[1, 3, 4]),
    (&[3], &[1, 2, 4]),
    (&[1, 2], &[3, 4]),
    (&[1, 3], &[2, 4]),
    (&[2, 3], &[1, 4]),
    (&[1, 2, 3], &[4]),
];

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

/// Six-run design for ten variables: the PB12 runs with x11 = +1.
pub const LIN_SSD: [[i8; 10]; 6] = [
    [-1, -1, -1, -1, -1, 1, 1, 1, 1, 1],
    [-1, -1, 1, 1, 1, -1, -1, -1, 1, 1],
    [-1, 1, -1, 1, 1, -1, 1, 1, -1, -1],
    [1, -1, 1, -1, 1, 1, 1, -1, -1, -1],
    [1, 1, 1, -1, -1, -1, -1, 1, 1, -1],
    [1, 1, -1, 1, -1, 1, -1, -1, -1, 1],
];

/// Twelve-run design for 21 variables: PB12 plus x1·x2, …, x1·x11.
pub const WU_SSD: [[i8; 21]; 12] = [
    [-1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
    [-1, -1, -1, -1, -1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, -1, -1, -1, -1, -1, -1],
    [-1, -1, 1, 1, 1, -1, -1, -1, 1, 1, 1, 1, -1, -1, -1, 1, 1, 1, -1, -1, -1],
    [-1, 1, -1, 1, 1, -1, 1, 1, -1, -1, 1, -1, 1, -1, -1, 1, -1, -1, 1, 1, -1],
    [-1, 1, 1, -1, 1, 1, -1, 1, -1, 1, -1, -1, -1, 1, -1, -1, 1, -1, 1, -1, 1],
    [-1, 1, 1, 1, -1, 1, 1, -1, 1, -1, -1, -1, -1, -1, 1, -1, -1, 1, -1, 1, 1],
    [1, -1, 1, 1, -1, -1, 1, 1, -1, 1, -1, -1, 1, 1, -1, -1, 1, 1, -1, 1, -1],
    [1, -1, 1, -1, 1, 1, 1, -1, -1, -1, 1, -1, 1, -1, 1, 1, 1, -1, -1, -1, 1],
    [1, -1, -1, 1, 1, 1, -1, 1, 1, -1, -1, -1, -1, 1, 1, 1, -1, 1, 1, -1, -1],
    [1, 1, 1, -1, -1, -1, -1, 1, 1, -1, 1, 1, 1, -1, -1, -1, -1, 1, 1, -1, 1],
    [1, 1, -1, 1, -1, 1, -1, -1, -1, 1, 1, 1, -1, 1, -1, 1, -1, -1, -1, 1, 1],
    [1, 1, -1, -1, 1, -1, 1, -1, 1, 1, -1, 1, -1, -1, 1, -1, 1, -1, 1, 1, -1],
];

/// Rows of a stored table as `i32`, for comparison with
/// [`screenkit::Design::to_int_rows`].
pub fn rows<const D: usize>(t: &[[i8; D]]) -> Vec<Vec<i32>> {
    t.iter().map(|r| r.iter().map(|&v| v as i32).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wu_table_extends_pb12_with_products() {
        for (w, p) in WU_SSD.iter().zip(&PB12) {
            assert_eq!(&w[..11], p);
            for k in 0..10 {
                assert_eq!(w[11 + k], p[0] * p[k + 1]);
            }
        }
    }

    #[test]
    fn lin_table_is_pb12_half() {
        let kept: Vec<Vec<i8>> = PB12.iter().filter(|r| r[10] == 1).map(|r| r[..10].to_vec()).collect();
        assert_eq!(kept, LIN_SSD.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
    }
}

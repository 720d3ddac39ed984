//! Dueck's deterministic MAC.
//!
//! Symbol codes (fixed, shared with the file formats):
//!
//! | alphabet | symbols | codes |
//! |---|---|---|
//! | `X1` | `a b A B` | `0 1 2 3` |
//! | `X2` | `0 1` | `0 1` |
//! | `Y1` | `a b c A B C` | `0 1 2 3 4 5` |
//! | `Y2` | `0 1` | `0 1` |
//!
//! The joint output symbol is `y = 2 * y1 + y2`.

use super::{DiscreteMac, MacError};

pub const X1_SYMBOLS: [char; 4] = ['a', 'b', 'A', 'B'];
pub const Y1_SYMBOLS: [char; 6] = ['a', 'b', 'c', 'A', 'B', 'C'];

pub const X1_LOWER_A: usize = 0;
pub const X1_LOWER_B: usize = 1;
pub const X1_UPPER_A: usize = 2;
pub const X1_UPPER_B: usize = 3;

pub const Y1_LOWER_C: usize = 2;
pub const Y1_UPPER_C: usize = 5;

pub const X1_SIZE: usize = 4;
pub const X2_SIZE: usize = 2;
pub const Y1_SIZE: usize = 6;
pub const Y2_SIZE: usize = 2;

pub fn x1_code(c: char) -> Option<usize> {
    X1_SYMBOLS.iter().position(|&s| s == c)
}

pub fn y1_code(c: char) -> Option<usize> {
    Y1_SYMBOLS.iter().position(|&s| s == c)
}

pub fn join_y(y1: usize, y2: usize) -> usize {
    y1 * Y2_SIZE + y2
}

pub fn split_y(y: usize) -> (usize, usize) {
    (y / Y2_SIZE, y % Y2_SIZE)
}

/// `W(x1, x2) = (W1, W2)`.
pub fn w(x1: usize, x2: usize) -> (usize, usize) {
    match (x1, x2) {
        (X1_LOWER_A | X1_LOWER_B, 0) => (Y1_LOWER_C, 0),
        (X1_UPPER_A | X1_UPPER_B, 1) => (Y1_UPPER_C, 1),
        // identity embedding a,b,A,B -> a,b,A,B skips the c slot
        (s, b) => (if s < 2 { s } else { s + 1 }, b),
    }
}

pub fn dueck_mac() -> DiscreteMac {
    DiscreteMac::from_map(X1_SIZE, X2_SIZE, Y1_SIZE * Y2_SIZE, |a, b| {
        let (y1, y2) = w(a, b);
        join_y(y1, y2)
    })
    .and_then(|m| m.with_factorization(Y1_SIZE, Y2_SIZE))
    .expect("Dueck tensor is a valid deterministic channel")
}

pub fn is_erasure(y1: usize) -> bool {
    y1 == Y1_LOWER_C || y1 == Y1_UPPER_C
}

/// Number of coordinates of a `Y1` word equal to `c` or `C`.
pub fn erasure_count(y1_word: &[usize]) -> Result<usize, MacError> {
    y1_word.iter().try_fold(0, |acc, &s| {
        if s >= Y1_SIZE {
            Err(MacError::SymbolOutOfRange { symbol: s, size: Y1_SIZE })
        } else {
            Ok(acc + usize::from(is_erasure(s)))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mac::{apply_n, enumerate_preimages, PREIMAGE_CAP};
    use crate::seed;

    fn y1_of(c: char) -> usize {
        y1_code(c).unwrap()
    }

    #[test]
    fn w_table() {
        let a = x1_code('a').unwrap();
        let b = x1_code('b').unwrap();
        let ua = x1_code('A').unwrap();
        let ub = x1_code('B').unwrap();
        assert_eq!(w(a, 0), (y1_of('c'), 0));
        assert_eq!(w(b, 0), (y1_of('c'), 0));
        assert_eq!(w(ua, 1), (y1_of('C'), 1));
        assert_eq!(w(ub, 1), (y1_of('C'), 1));
        assert_eq!(w(ua, 0), (y1_of('A'), 0));
        assert_eq!(w(ub, 0), (y1_of('B'), 0));
        assert_eq!(w(a, 1), (y1_of('a'), 1));
        assert_eq!(w(b, 1), (y1_of('b'), 1));
    }

    #[test]
    fn channel_matches_map() {
        let mac = dueck_mac();
        assert!(mac.is_deterministic());
        assert_eq!(mac.y_factors(), Some((6, 2)));
        for x1 in 0..4 {
            for x2 in 0..2 {
                let (y1, y2) = w(x1, x2);
                assert_eq!(mac.map(x1, x2), Some(join_y(y1, y2)));
                assert_eq!(y2, x2);
            }
        }
    }

    #[test]
    fn apply_word() {
        let mac = dueck_mac();
        let y = apply_n(&mac, &[X1_LOWER_A, X1_UPPER_A], &[0, 0], &mut seed::stream(0, &[])).unwrap();
        assert_eq!(y, vec![join_y(y1_of('c'), 0), join_y(y1_of('A'), 0)]);
    }

    #[test]
    fn erasure_counts() {
        assert_eq!(erasure_count(&[y1_of('c'), y1_of('C'), y1_of('a')]).unwrap(), 2);
        assert_eq!(erasure_count(&[0; 7]).unwrap(), 0);
        assert!(erasure_count(&[6]).is_err());
    }

    #[test]
    fn small_preimages() {
        let mac = dueck_mac();
        let pre = enumerate_preimages(&mac, &[join_y(y1_of('c'), 0)], PREIMAGE_CAP).unwrap();
        assert_eq!(pre, vec![(vec![X1_LOWER_A], vec![0]), (vec![X1_LOWER_B], vec![0])]);
        let pre = enumerate_preimages(&mac, &[join_y(y1_of('A'), 0)], PREIMAGE_CAP).unwrap();
        assert_eq!(pre, vec![(vec![X1_UPPER_A], vec![0])]);
        // (c, 1) is not an output of the channel
        assert!(enumerate_preimages(&mac, &[join_y(y1_of('c'), 1)], PREIMAGE_CAP).unwrap().is_empty());
        let err = enumerate_preimages(&mac, &[join_y(y1_of('c'), 0); 5], 16).unwrap_err();
        assert!(matches!(err, MacError::PreimageCapExceeded { .. }));
    }
}

//! Boolean functions on n bits, stored as dense truth tables.
//!
//! A function is written out as the tuple of its values: the table
//! `a_0 a_1 ... a_{2^n - 1}` stands for the function h with h(k) = a_k,
//! where the input k is read as an n-bit big-endian integer. All string
//! forms ("0100...") list the bits in that order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported input width; tables are dense with 2^n entries.
pub const MAX_N: usize = 14;

/// Dense truth table of a Boolean function on `n` input bits.
///
/// Entry k lives in word k / 64 at bit position k % 64. Unused high bits
/// of the last word are always zero, so word-level equality, XOR, and
/// popcount act directly on the table.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct BoolFunc {
    n: usize,
    words: Vec<u64>,
}

impl BoolFunc {
    /// The all-zeros function on `n` bits.
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::InvalidN { n, min: 1, max: MAX_N });
        }
        let words = vec![0u64; word_len(n)];
        Ok(Self { n, words })
    }

    /// Builds a table by evaluating `f` at every input 0..2^n.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> bool) -> Result<Self> {
        let mut out = Self::zero(n)?;
        for k in 0..out.size() {
            if f(k) {
                out.words[k >> 6] |= 1u64 << (k & 63);
            }
        }
        Ok(out)
    }

    /// Decodes the hex form produced by [`table_hex`](Self::table_hex).
    pub fn from_table_hex(n: usize, hex: &str) -> Result<Self> {
        let mut out = Self::zero(n)?;
        let nbytes = out.size().div_ceil(8);
        if hex.len() != 2 * nbytes {
            return Err(Error::BadTable(format!(
                "expected {} hex digits for n={n}, got {}",
                2 * nbytes,
                hex.len()
            )));
        }
        for (j, pair) in hex.as_bytes().chunks(2).enumerate() {
            let s = std::str::from_utf8(pair).map_err(|_| bad_hex(hex))?;
            let byte = u8::from_str_radix(s, 16).map_err(|_| bad_hex(hex))?;
            for b in 0..8 {
                let k = 8 * j + b;
                if byte >> (7 - b) & 1 == 1 {
                    if k >= out.size() {
                        return Err(Error::BadTable(format!(
                            "padding bits must be zero in {hex:?} for n={n}"
                        )));
                    }
                    out.words[k >> 6] |= 1u64 << (k & 63);
                }
            }
        }
        Ok(out)
    }

    /// Number of input bits.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Table length, 2^n.
    pub fn size(&self) -> usize {
        1 << self.n
    }

    /// The value h(k). Panics if k is out of range.
    pub fn eval(&self, k: usize) -> bool {
        assert!(k < self.size(), "input {k} out of range for n={}", self.n);
        self.words[k >> 6] >> (k & 63) & 1 == 1
    }

    /// The function with every table entry flipped.
    pub fn complement(&self) -> Self {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        mask_tail(self.n, &mut words);
        Self { n: self.n, words }
    }

    /// Entrywise XOR of two tables.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        self.check_n(other)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(Self { n: self.n, words })
    }

    /// Number of inputs on which the two functions disagree.
    pub fn hamming(&self, other: &Self) -> Result<usize> {
        self.check_n(other)?;
        let count = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum();
        Ok(count)
    }

    /// The (n+1)-bit table holding two copies of this one: `a -> aa`.
    pub fn duplicated(&self) -> Result<Self> {
        let half = self.size();
        Self::from_fn(self.n + 1, |k| self.eval(k % half))
    }

    /// The (n+1)-bit table with the first copy complemented: `a -> āa`.
    pub fn duplicated_complement(&self) -> Result<Self> {
        let half = self.size();
        Self::from_fn(self.n + 1, |k| self.eval(k % half) ^ (k < half))
    }

    /// Packed table as lowercase hex, entry a_k at bit 7-(k mod 8) of byte
    /// k/8 so that the hex digits read in table order; sub-byte tables pad
    /// with zeros at the low end.
    pub fn table_hex(&self) -> String {
        let nbytes = self.size().div_ceil(8);
        let mut s = String::with_capacity(2 * nbytes);
        for j in 0..nbytes {
            let mut byte = 0u8;
            for b in 0..8 {
                let k = 8 * j + b;
                if k < self.size() && self.eval(k) {
                    byte |= 1 << (7 - b);
                }
            }
            s.push_str(&format!("{byte:02x}"));
        }
        s
    }

    fn check_n(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::NMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }
}

/// Orders tables by n, then lexicographically by the bit string a_0 a_1 ...
impl Ord for BoolFunc {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.n.cmp(&other.n) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                // The lowest differing entry decides; 0 sorts before 1.
                let k = diff.trailing_zeros();
                return if a >> k & 1 == 0 { Ordering::Less } else { Ordering::Greater };
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for BoolFunc {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BoolFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.size() {
            f.write_str(if self.eval(k) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BoolFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.size() <= 64 {
            write!(f, "BoolFunc(n={}, {})", self.n, self)
        } else {
            write!(f, "BoolFunc(n={}, 0x{})", self.n, self.table_hex())
        }
    }
}

impl FromStr for BoolFunc {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let len = s.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::BadTable(format!(
                "table length {len} is not a power of two >= 2"
            )));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_N {
            return Err(Error::InvalidN { n, min: 1, max: MAX_N });
        }
        let bytes = s.as_bytes();
        let mut bad = None;
        let out = Self::from_fn(n, |k| match bytes[k] {
            b'0' => false,
            b'1' => true,
            c => {
                bad = Some(c as char);
                false
            }
        })?;
        match bad {
            Some(c) => Err(Error::BadTable(format!("unexpected character {c:?} in table"))),
            None => Ok(out),
        }
    }
}

/// JSON form: an object with the bit count and the packed table.
#[derive(Serialize, Deserialize)]
struct TableRepr {
    n: usize,
    table_hex: String,
}

impl From<BoolFunc> for TableRepr {
    fn from(f: BoolFunc) -> Self {
        Self { n: f.n(), table_hex: f.table_hex() }
    }
}

impl TryFrom<TableRepr> for BoolFunc {
    type Error = Error;

    fn try_from(r: TableRepr) -> Result<Self> {
        BoolFunc::from_table_hex(r.n, &r.table_hex)
    }
}

fn word_len(n: usize) -> usize {
    (1usize << n).div_ceil(64)
}

/// Clears bits past the table end in the last word.
fn mask_tail(n: usize, words: &mut [u64]) {
    let used = (1usize << n) & 63;
    if used != 0 {
        *words.last_mut().expect("table has at least one word") &= (1u64 << used) - 1;
    }
}

fn bad_hex(hex: &str) -> Error {
    Error::BadTable(format!("invalid hex table {hex:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> BoolFunc {
        s.parse().unwrap()
    }

    #[test]
    fn parse_display_roundtrip() {
        for s in ["01000000", "0100", "01", "1111111100000000"] {
            assert_eq!(f(s).to_string(), s);
        }
    }

    #[test]
    fn eval_follows_table_order() {
        let h = f("01000000");
        assert_eq!(h.n(), 3);
        assert!(h.eval(1));
        for k in [0, 2, 3, 4, 5, 6, 7] {
            assert!(!h.eval(k));
        }
        // h(100) = a_4 with the input read as a big-endian integer.
        assert!(f("00001000").eval(4));
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!("010".parse::<BoolFunc>().is_err());
        assert!("01x0".parse::<BoolFunc>().is_err());
        assert!("0".parse::<BoolFunc>().is_err());
        let huge = "01".repeat(1 << 14);
        assert!(huge.parse::<BoolFunc>().is_err());
    }

    #[test]
    fn xor_examples() {
        let a = f("01000000");
        assert_eq!(a.xor(&a).unwrap(), f("00000000"));
        assert_eq!(a.xor(&f("10110000")).unwrap(), f("11110000"));
        let b = f("01010101");
        assert_eq!(b.xor(&f("00000000")).unwrap(), b);
        assert!(a.xor(&f("0100")).is_err());
    }

    #[test]
    fn complement_is_involution() {
        let a = f("01000000");
        assert_eq!(a.complement(), f("10111111"));
        assert_eq!(a.complement().complement(), a);
    }

    #[test]
    fn hamming_counts_disagreements() {
        assert_eq!(f("01000000").hamming(&f("01010101")).unwrap(), 3);
        assert_eq!(f("01010101").hamming(&f("11000011")).unwrap(), 4);
        let long = f("1111111100000000");
        assert_eq!(long.hamming(&long.complement()).unwrap(), 16);
    }

    #[test]
    fn lexicographic_order() {
        assert!(f("01000000") < f("10000000"));
        assert!(f("00000000") < f("00000001"));
        assert!(f("0100") < f("01000000")); // smaller n sorts first
        let h = f("01101001");
        assert!(h < h.complement());
    }

    #[test]
    fn duplication_examples() {
        assert_eq!(f("01").duplicated().unwrap(), f("0101"));
        assert_eq!(f("01").duplicated_complement().unwrap(), f("1001"));
        assert_eq!(f("01000000").duplicated().unwrap(), f("0100000001000000"));
        assert_eq!(
            f("01000000").duplicated_complement().unwrap(),
            f("1011111101000000")
        );
    }

    #[test]
    fn hex_packs_msb_first() {
        assert_eq!(f("01000000").table_hex(), "40");
        assert_eq!(f("0100").table_hex(), "40");
        assert_eq!(f("1111111100000000").table_hex(), "ff00");
        assert_eq!(BoolFunc::from_table_hex(3, "40").unwrap(), f("01000000"));
        assert_eq!(BoolFunc::from_table_hex(2, "40").unwrap(), f("0100"));
    }

    #[test]
    fn hex_rejects_stray_padding() {
        // n=2 uses only the high nibble; low bits must be zero.
        assert!(BoolFunc::from_table_hex(2, "41").is_err());
        assert!(BoolFunc::from_table_hex(3, "4").is_err());
        assert!(BoolFunc::from_table_hex(3, "zz").is_err());
    }

    #[test]
    fn serde_uses_hex_object() {
        let h = f("01000000");
        let json = serde_json::to_string(&h).unwrap();
        assert_eq!(json, r#"{"n":3,"table_hex":"40"}"#);
        let back: BoolFunc = serde_json::from_str(&json).unwrap();
        assert_eq!(back, h);
        assert!(serde_json::from_str::<BoolFunc>(r#"{"n":2,"table_hex":"41"}"#).is_err());
    }

    #[test]
    fn words_stay_masked() {
        // Complement on a sub-word table must not leak into padding,
        // otherwise Eq/Hash/hamming on words would be wrong.
        let a = f("0100").complement();
        assert_eq!(a, f("1011"));
        assert_eq!(a.hamming(&f("1011")).unwrap(), 0);
        assert_eq!(a.table_hex(), "b0");
    }
}

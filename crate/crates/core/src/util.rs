use std::fmt;

/// Rotates `v` right by `shift` positions: `out[(j + shift) % n] = v[j]`.
///
/// A codeword rotated right by `m` has its chip `j` taken from chip `j - m` of the original.
pub fn rotate_right<T: Clone>(v: &[T], shift: usize) -> Vec<T> {
    let n = v.len();
    if n == 0 {
        return Vec::new();
    }
    let s = shift % n;
    let mut out = Vec::with_capacity(n);
    out.extend_from_slice(&v[n - s..]);
    out.extend_from_slice(&v[..n - s]);
    out
}

/// A list of constraint violations; empty when the checked object is valid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport<V> {
    pub violations: Vec<V>,
}

impl<V> VerificationReport<V> {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }
}

impl<V> Default for VerificationReport<V> {
    fn default() -> Self {
        Self {
            violations: Vec::new(),
        }
    }
}

impl<V: fmt::Display> fmt::Display for VerificationReport<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "ok: no violations");
        }
        writeln!(f, "{} violation(s):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

pub(crate) fn bits_from_str(line: &str, lineno: usize) -> crate::Result<Vec<u8>> {
    line.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(crate::Error::parse(
                lineno,
                format!("unexpected character {other:?}, expected 0 or 1"),
            )),
        })
        .collect()
}

pub(crate) fn bits_to_string(bits: &[u8]) -> String {
    bits.iter()
        .map(|&b| if b == 0 { '0' } else { '1' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotate_right_moves_chips_forward() {
        assert_eq!(
            rotate_right(&[1, 1, 0, 1, 0, 0, 0], 1),
            vec![0, 1, 1, 0, 1, 0, 0]
        );
        assert_eq!(rotate_right(&[1, 2, 3], 3), vec![1, 2, 3]);
        assert_eq!(rotate_right(&[1, 2, 3], 5), vec![2, 3, 1]);
        assert!(rotate_right::<u8>(&[], 4).is_empty());
    }
}

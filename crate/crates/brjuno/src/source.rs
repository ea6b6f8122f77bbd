//! Line-oriented digit and oracle sources. Both read lazily and keep what
//! they have read, so repeated or concurrent lookups see the same values.

use std::io::BufRead;
use std::sync::Mutex;

use brjuno_core::cf::DigitSource;
use brjuno_core::inversion::TargetOracle;
use brjuno_core::{Dyadic, Error};

struct Lines<R> {
    reader: R,
    done: bool,
    error: Option<Error>,
}

impl<R: BufRead> Lines<R> {
    /// Next non-blank line, trimmed.
    fn next_line(&mut self) -> Option<String> {
        if self.done {
            return None;
        }
        let mut buf = String::new();
        loop {
            buf.clear();
            match self.reader.read_line(&mut buf) {
                Ok(0) => break,
                Ok(_) if buf.trim().is_empty() => continue,
                Ok(_) => return Some(buf.trim().to_string()),
                Err(e) => {
                    self.error = Some(Error::Parse(format!("read error: {e}")));
                    break;
                }
            }
        }
        self.done = true;
        None
    }
}

/// Digits, one per line (whitespace-separated digits on a line also work).
pub struct MemoSource<R> {
    inner: Mutex<(Lines<R>, Vec<u64>)>,
}

impl<R: BufRead> MemoSource<R> {
    pub fn new(reader: R) -> MemoSource<R> {
        MemoSource { inner: Mutex::new((Lines { reader, done: false, error: None }, Vec::new())) }
    }

    /// First malformed input seen, if any.
    pub fn error(&self) -> Option<Error> {
        self.inner.lock().unwrap().0.error.clone()
    }
}

impl<R: BufRead + Send> DigitSource for MemoSource<R> {
    fn digit(&self, index: u64) -> Option<u64> {
        let mut guard = self.inner.lock().unwrap();
        let (lines, seen) = &mut *guard;
        while seen.len() as u64 <= index {
            let line = lines.next_line()?;
            for tok in line.split_whitespace() {
                match tok.parse::<u64>() {
                    Ok(d) if d > 0 => seen.push(d),
                    _ => {
                        lines.error = Some(Error::Parse(format!("digit {tok:?}")));
                        lines.done = true;
                        return None;
                    }
                }
            }
        }
        seen.get(index as usize).copied()
    }
}

/// `y_1, y_2, ...` as dyadics (`m*2^e` or exact decimals), one per line.
pub struct LineOracle<R> {
    lines: Lines<R>,
}

impl<R: BufRead> LineOracle<R> {
    pub fn new(reader: R) -> LineOracle<R> {
        LineOracle { lines: Lines { reader, done: false, error: None } }
    }

    pub fn error(&self) -> Option<Error> {
        self.lines.error.clone()
    }
}

impl<R: BufRead> TargetOracle for LineOracle<R> {
    // pulls arrive in order 1, 2, 3, ... (the inversion caches them)
    fn pull(&mut self, _n: u64) -> Option<Dyadic> {
        let line = self.lines.next_line()?;
        match line.parse::<Dyadic>() {
            Ok(d) => Some(d),
            Err(e) => {
                self.lines.error = Some(e);
                self.lines.done = true;
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn memo_rereads() {
        let src = MemoSource::new("3\n\n1 4\n1\n".as_bytes());
        assert_eq!(src.digit(2), Some(4));
        assert_eq!(src.digit(0), Some(3));
        assert_eq!(src.digit(4), None);
        assert!(src.error().is_none());
        let bad = MemoSource::new("2\n0\n".as_bytes());
        assert_eq!(bad.digit(1), None);
        assert!(bad.error().is_some());
    }

    #[test]
    fn oracle_lines() {
        let mut o = LineOracle::new("1*2^-1\n0.75\nx\n".as_bytes());
        assert_eq!(o.pull(1), Some(Dyadic::pow2(-1)));
        assert_eq!(o.pull(2), Some(Dyadic::new(3.into(), -2)));
        assert_eq!(o.pull(3), None);
        assert!(o.error().is_some());
    }
}

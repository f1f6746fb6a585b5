use std::io::Write;
use std::path::Path;

use cohstate_core::{QuadraturePolicy, SpectrumSpec, TruncationPolicy};

/// Fixed-width scientific formatting, 15 significant digits, so repeated runs
/// are byte-identical. Negative zero prints as zero.
pub fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.14e}")
}

pub struct Report {
    buf: Vec<u8>,
}

impl Report {
    pub fn new() -> Self {
        Report { buf: Vec::new() }
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.buf.extend_from_slice(s.as_ref().as_bytes());
        self.buf.push(b'\n');
    }

    pub fn meta(&mut self, s: impl AsRef<str>) {
        self.buf.push(b'#');
        self.buf.push(b' ');
        self.buf.extend_from_slice(s.as_ref().as_bytes());
        self.buf.push(b'\n');
    }

    pub fn preamble(
        &mut self,
        command: &str,
        spec: &SpectrumSpec,
        policy: &TruncationPolicy,
        quad: Option<&QuadraturePolicy>,
    ) {
        self.meta(format!("cohstate {} {command}", env!("CARGO_PKG_VERSION")));
        self.meta(format!(
            "spectrum: {} omega: {}",
            spec.name(),
            num(spec.omega())
        ));
        self.meta(format!(
            "policy: rel_tol {} n_cap {}",
            num(policy.rel_tol),
            policy.n_cap
        ));
        if let Some(q) = quad {
            self.meta(format!(
                "quad: abs_tol {} rel_tol {} max_panels {}",
                num(q.abs_tol),
                num(q.rel_tol),
                q.max_panels
            ));
        }
    }

    /// Write the whole report in one call, to the file when a path was given
    /// and to stdout otherwise.
    pub fn finish(self, out: Option<&Path>) -> std::io::Result<()> {
        match out {
            Some(path) => std::fs::write(path, &self.buf),
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                lock.write_all(&self.buf)?;
                lock.flush()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::num;

    #[test]
    fn formatting_is_fifteen_significant_digits() {
        assert_eq!(num(1.0), "1.00000000000000e0");
        assert_eq!(num(0.0), "0.00000000000000e0");
        assert_eq!(num(-0.0), "0.00000000000000e0");
        assert_eq!(num(1.0 / 3.0), "3.33333333333333e-1");
        assert_eq!(num(-2.5e-16), "-2.50000000000000e-16");
    }

    #[test]
    fn parsing_back_recovers_the_value_to_working_precision() {
        for &x in &[0.1, std::f64::consts::PI, 1.7e-300, 9.99999999999999e99] {
            let back: f64 = num(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 5e-15, "{x} printed as {}", num(x));
        }
    }
}

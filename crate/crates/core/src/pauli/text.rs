//! Textual Pauli notation.
//!
//! ```text
//! string := [phase " * "] ops
//! phase  := "-1" | "i" | "-i"
//! ops    := "I" | op (" " op)*
//! op     := ("X" | "Y" | "Z") qubit-index
//! term   := coefficient " * " string
//! sum    := "qubits " width "\n" (term "\n")*
//! ```
//!
//! Coefficients use the shortest decimal form that parses back to the same
//! float, so printing and parsing round-trip exactly. The unicode minus sign
//! is accepted on input.

use std::fmt;
use std::str::FromStr;

use super::string::{Pauli, PauliString, Phase};
use super::sum::PauliSum;
use crate::error::{Error, Result};
use crate::scalar::Real;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn normalize(s: &str) -> String {
    s.replace('\u{2212}', "-")
}

fn parse_phase(s: &str) -> Result<Phase> {
    match s {
        "1" | "+1" => Ok(Phase::ONE),
        "-1" => Ok(Phase::MINUS_ONE),
        "i" | "+i" => Ok(Phase::I),
        "-i" => Ok(Phase::MINUS_I),
        other => Err(parse_err(format!("bad phase {other:?}"))),
    }
}

fn parse_ops(s: &str, n_qubits: usize) -> Result<PauliString> {
    let s = s.trim();
    if s == "I" {
        return PauliString::identity(n_qubits);
    }
    let mut ops = Vec::new();
    for tok in s.split_whitespace() {
        let mut chars = tok.chars();
        let pauli = match chars.next() {
            Some('X') => Pauli::X,
            Some('Y') => Pauli::Y,
            Some('Z') => Pauli::Z,
            _ => return Err(parse_err(format!("bad operator {tok:?}"))),
        };
        let index: usize = chars
            .as_str()
            .parse()
            .map_err(|_| parse_err(format!("bad qubit index in {tok:?}")))?;
        if ops.iter().any(|&(q, _)| q == index) {
            return Err(parse_err(format!("qubit {index} repeated")));
        }
        ops.push((index, pauli));
    }
    if ops.is_empty() {
        return Err(parse_err("empty operator list"));
    }
    PauliString::from_ops(n_qubits, &ops)
}

impl PauliString {
    /// Parses the textual notation for a register of `n_qubits`.
    pub fn parse(s: &str, n_qubits: usize) -> Result<Self> {
        let s = normalize(s);
        let parts: Vec<&str> = s.split('*').map(str::trim).collect();
        match parts.as_slice() {
            [ops] => parse_ops(ops, n_qubits),
            [phase, ops] => Ok(parse_ops(ops, n_qubits)?.with_phase(parse_phase(phase)?)),
            _ => Err(parse_err(format!("cannot parse pauli string {s:?}"))),
        }
    }

    fn fmt_ops(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("I");
        }
        let mut first = true;
        for q in 0..self.n_qubits() {
            let p = self.get(q);
            if p != Pauli::I {
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{}{}", p.letter(), q)?;
                first = false;
            }
        }
        Ok(())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase() {
            Phase::ONE => {}
            Phase::MINUS_ONE => f.write_str("-1 * ")?,
            Phase::I => f.write_str("i * ")?,
            _ => f.write_str("-i * ")?,
        }
        self.fmt_ops(f)
    }
}

impl<T: Real> fmt::Display for PauliSum<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.n_qubits())?;
        for (c, s) in self.terms() {
            writeln!(f, "{c} * {s}")?;
        }
        Ok(())
    }
}

impl<T: Real + FromStr> PauliSum<T> {
    /// Parses the output of `Display`. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let text = normalize(text);
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| parse_err("missing header"))?;
        let n_qubits: usize = header
            .strip_prefix("qubits")
            .map(str::trim)
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| parse_err(format!("bad header {header:?}")))?;
        let mut sum = PauliSum::new(n_qubits);
        for line in lines {
            let (coeff, rest) = line
                .split_once('*')
                .ok_or_else(|| parse_err(format!("missing '*' in {line:?}")))?;
            let coeff: T = coeff
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("bad coefficient in {line:?}")))?;
            sum.push(coeff, PauliString::parse(rest, n_qubits)?)?;
        }
        Ok(sum)
    }
}

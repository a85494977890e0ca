//! Gate lists and their line-oriented text format.
//!
//! One gate per line: `H 0`, `S 1`, `SDG 1`, `CX 0 1`, `T 3`, `TDG 3`,
//! `PERM 2 0 1`. Blank lines are ignored and `#` starts a comment.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    CX(usize, usize),
    T(usize),
    Tdg(usize),
    /// Qubit `i` is moved to position `perm[i]`.
    Perm(Vec<usize>),
}

impl Gate {
    pub fn is_clifford(&self) -> bool {
        !matches!(self, Gate::T(_) | Gate::Tdg(_))
    }

    pub fn is_t(&self) -> bool {
        matches!(self, Gate::T(_) | Gate::Tdg(_))
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::H(q) => Gate::H(*q),
            Gate::S(q) => Gate::Sdg(*q),
            Gate::Sdg(q) => Gate::S(*q),
            Gate::CX(c, t) => Gate::CX(*c, *t),
            Gate::T(q) => Gate::Tdg(*q),
            Gate::Tdg(q) => Gate::T(*q),
            Gate::Perm(p) => {
                let mut inv = vec![0; p.len()];
                for (i, &j) in p.iter().enumerate() {
                    inv[j] = i;
                }
                Gate::Perm(inv)
            }
        }
    }

    /// Largest qubit index touched, plus one.
    pub fn span(&self) -> usize {
        match self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::T(q) | Gate::Tdg(q) => q + 1,
            Gate::CX(c, t) => c.max(t) + 1,
            Gate::Perm(p) => p.len(),
        }
    }

    /// Validates indices against an `n`-qubit register.
    pub fn check(&self, n: usize) -> Result<()> {
        match self {
            Gate::CX(c, t) if c == t => Err(Error::InvalidArgument(format!(
                "CX control and target coincide on qubit {c}"
            ))),
            Gate::Perm(p) => check_permutation(p, n),
            g => {
                let s = g.span();
                if s > n {
                    Err(Error::QubitOutOfRange { qubit: s - 1, n })
                } else {
                    Ok(())
                }
            }
        }
    }

    /// The same gate with every qubit `q` relabelled to `map[q]`.
    pub fn relabel(&self, map: &[usize], n: usize) -> Gate {
        match self {
            Gate::H(q) => Gate::H(map[*q]),
            Gate::S(q) => Gate::S(map[*q]),
            Gate::Sdg(q) => Gate::Sdg(map[*q]),
            Gate::T(q) => Gate::T(map[*q]),
            Gate::Tdg(q) => Gate::Tdg(map[*q]),
            Gate::CX(c, t) => Gate::CX(map[*c], map[*t]),
            Gate::Perm(p) => {
                // qubit map[i] goes to map[p[i]], others stay put
                let mut full: Vec<usize> = (0..n).collect();
                for (i, &j) in p.iter().enumerate() {
                    full[map[i]] = map[j];
                }
                Gate::Perm(full)
            }
        }
    }
}

pub(crate) fn check_permutation(p: &[usize], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "length {} on {} qubits",
            p.len(),
            n
        )));
    }
    let mut seen = vec![false; n];
    for &j in p {
        if j >= n || seen[j] {
            return Err(Error::InvalidPermutation(format!("{p:?}")));
        }
        seen[j] = true;
    }
    Ok(())
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::S(q) => write!(f, "S {q}"),
            Gate::Sdg(q) => write!(f, "SDG {q}"),
            Gate::CX(c, t) => write!(f, "CX {c} {t}"),
            Gate::T(q) => write!(f, "T {q}"),
            Gate::Tdg(q) => write!(f, "TDG {q}"),
            Gate::Perm(p) => {
                f.write_str("PERM")?;
                for j in p {
                    write!(f, " {j}")?;
                }
                Ok(())
            }
        }
    }
}

/// An ordered gate list on `n` qubits; the first gate acts first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Circuit {
    pub n: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit { n, gates: vec![] }
    }

    pub fn from_gates(n: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.check(n)?;
        }
        Ok(Circuit { n, gates })
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        g.check(self.n)?;
        self.gates.push(g);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) {
        self.gates.extend(other.gates.iter().cloned());
    }

    pub fn t_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_t()).count()
    }

    pub fn is_clifford(&self) -> bool {
        self.gates.iter().all(Gate::is_clifford)
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            n: self.n,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for g in &self.gates {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses the text format. With `n = None` the register size is the
    /// largest index seen plus one.
    pub fn parse(text: &str, n: Option<usize>) -> Result<Circuit> {
        let mut gates = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse {
                line: lineno + 1,
                msg,
            };
            let mut parts = line.split_whitespace();
            let name = parts.next().unwrap_or("").to_ascii_uppercase();
            let args: Vec<usize> = parts
                .map(|a| {
                    a.parse::<usize>()
                        .map_err(|_| err(format!("bad qubit index {a:?}")))
                })
                .collect::<Result<_>>()?;
            let want = |k: usize| {
                if args.len() == k {
                    Ok(())
                } else {
                    Err(err(format!("{name} takes {k} argument(s), got {}", args.len())))
                }
            };
            let g = match name.as_str() {
                "H" => want(1).map(|_| Gate::H(args[0]))?,
                "S" => want(1).map(|_| Gate::S(args[0]))?,
                "SDG" | "S†" => want(1).map(|_| Gate::Sdg(args[0]))?,
                "T" => want(1).map(|_| Gate::T(args[0]))?,
                "TDG" | "T†" => want(1).map(|_| Gate::Tdg(args[0]))?,
                "CX" | "CNOT" => want(2).map(|_| Gate::CX(args[0], args[1]))?,
                "PERM" => {
                    check_permutation(&args, args.len()).map_err(|e| err(e.to_string()))?;
                    Gate::Perm(args)
                }
                other => return Err(err(format!("unknown gate {other:?}"))),
            };
            if let Some(n) = n {
                g.check(n).map_err(|e| err(e.to_string()))?;
            } else if let Gate::CX(c, t) = g {
                if c == t {
                    return Err(err("CX control and target coincide".into()));
                }
            }
            gates.push(g);
        }
        let n = n.unwrap_or_else(|| gates.iter().map(Gate::span).max().unwrap_or(0));
        for g in &gates {
            if let Gate::Perm(p) = g {
                if p.len() != n {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("PERM of length {} on {n} qubits", p.len()),
                    });
                }
            }
        }
        Ok(Circuit { n, gates })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let c = Circuit::from_gates(
            3,
            vec![
                Gate::H(0),
                Gate::CX(0, 1),
                Gate::T(2),
                Gate::Sdg(1),
                Gate::Perm(vec![2, 0, 1]),
            ],
        )
        .unwrap();
        let back = Circuit::parse(&c.to_text(), Some(3)).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = Circuit::parse("# header\n\nH 0  # trailing\nCX 0 1\n", None).unwrap();
        assert_eq!(c.n, 2);
        assert_eq!(c.gates.len(), 2);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = Circuit::parse("H 0\nFOO 1\n", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = Circuit::parse("H 0\n\nCX 1\n", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        let e = Circuit::parse("H 5\n", Some(2)).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = Circuit::parse("PERM 0 0\n", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn inverse_reverses_and_inverts() {
        let c = Circuit::from_gates(2, vec![Gate::S(0), Gate::CX(0, 1), Gate::T(1)]).unwrap();
        let inv = c.inverse();
        assert_eq!(inv.gates, vec![Gate::Tdg(1), Gate::CX(0, 1), Gate::Sdg(0)]);
    }
}

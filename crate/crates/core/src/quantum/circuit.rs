use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

use super::density::{ensure_budget, hermitize, DensityMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    H,
    T,
    X,
    Z,
    Cnot { control: u32 },
}

/// A gate on `target`, applied only when input bit `condition` is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub target: u32,
    pub condition: Option<u32>,
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GateKind::H => write!(f, "H {}", self.target)?,
            GateKind::T => write!(f, "T {}", self.target)?,
            GateKind::X => write!(f, "X {}", self.target)?,
            GateKind::Z => write!(f, "Z {}", self.target)?,
            GateKind::Cnot { control } => write!(f, "CNOT {} {}", self.target, control)?,
        }
        if let Some(j) = self.condition {
            write!(f, " if x{j}")?;
        }
        Ok(())
    }
}

/// Gates over `qubits` wires. The advice occupies the leading wires, the
/// rest start in |0⟩; `accept` is measured in the computational basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    qubits: u32,
    accept: u32,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubits: u32, accept: u32, gates: Vec<Gate>) -> Result<Self> {
        if qubits == 0 {
            return Err(invalid("circuit needs at least one qubit"));
        }
        ensure_budget(qubits)?;
        if accept >= qubits {
            return Err(invalid(format!("accept qubit {accept} out of range")));
        }
        for g in &gates {
            if g.target >= qubits {
                return Err(invalid(format!("gate `{g}` targets a missing qubit")));
            }
            if let GateKind::Cnot { control } = g.kind {
                if control >= qubits || control == g.target {
                    return Err(invalid(format!("gate `{g}` has an invalid control")));
                }
            }
        }
        Ok(Self { qubits, accept, gates })
    }

    /// Measure `accept` directly, with no gates.
    pub fn readout(qubits: u32, accept: u32) -> Result<Self> {
        Self::new(qubits, accept, Vec::new())
    }

    pub fn qubits(&self) -> u32 {
        self.qubits
    }

    pub fn accept(&self) -> u32 {
        self.accept
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Highest input bit referenced by a condition, if any.
    pub fn max_condition(&self) -> Option<u32> {
        self.gates.iter().filter_map(|g| g.condition).max()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(u32, u32)> = None;
        let mut gates = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: k + 1, message };
            if header.is_none() {
                let mut q = None;
                let mut a = None;
                for field in line.split_whitespace() {
                    match field.split_once('=') {
                        Some(("qubits", v)) => q = v.parse().ok(),
                        Some(("accept", v)) => a = v.parse().ok(),
                        _ => return Err(err(format!("unexpected header field {field:?}"))),
                    }
                }
                match (q, a) {
                    (Some(q), Some(a)) => header = Some((q, a)),
                    _ => return Err(err("header must be `qubits=<int> accept=<int>`".into())),
                }
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let (body, condition) = match tokens.iter().position(|&t| t == "if") {
                Some(p) => {
                    if p + 2 != tokens.len() {
                        return Err(err("condition must be `if x<j>`".into()));
                    }
                    let j = tokens[p + 1]
                        .strip_prefix('x')
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| err(format!("bad condition {:?}", tokens[p + 1])))?;
                    (&tokens[..p], Some(j))
                }
                None => (&tokens[..], None),
            };
            let num = |s: &str| s.parse::<u32>().map_err(|_| err(format!("bad qubit {s:?}")));
            let gate = match body {
                [name, t] => {
                    let kind = match name.to_ascii_uppercase().as_str() {
                        "H" => GateKind::H,
                        "T" => GateKind::T,
                        "X" => GateKind::X,
                        "Z" => GateKind::Z,
                        other => return Err(err(format!("unknown gate {other:?}"))),
                    };
                    Gate {
                        kind,
                        target: num(t)?,
                        condition,
                    }
                }
                [name, t, c] if name.eq_ignore_ascii_case("CNOT") => Gate {
                    kind: GateKind::Cnot { control: num(c)? },
                    target: num(t)?,
                    condition,
                },
                _ => return Err(err(format!("cannot parse gate line {line:?}"))),
            };
            gates.push(gate);
        }
        let (q, a) = header.ok_or_else(|| Error::Parse {
            line: 0,
            message: "missing header".into(),
        })?;
        Self::new(q, a, gates)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("qubits={} accept={}\n", self.qubits, self.accept);
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    fn check_input(&self, x: &[bool]) -> Result<()> {
        if let Some(j) = self.max_condition() {
            if j as usize >= x.len() {
                return Err(invalid(format!("circuit reads input bit {j} of a {}-bit input", x.len())));
            }
        }
        Ok(())
    }

    /// Apply the gates selected by `x` to a full-width operator, `M -> U M U†`.
    fn evolve(&self, x: &[bool], m: &mut DMatrix<Complex64>) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        for g in &self.gates {
            if let Some(j) = g.condition {
                if !x[j as usize] {
                    continue;
                }
            }
            let u = match g.kind {
                GateKind::H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
                GateKind::T => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]],
                GateKind::X => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
                GateKind::Z => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
                GateKind::Cnot { control } => {
                    apply_cnot(m, self.qubits, control, g.target);
                    continue;
                }
            };
            apply_single(m, self.qubits, g.target, &u);
        }
    }

    fn accept_mass(&self, m: &DMatrix<Complex64>) -> Complex64 {
        let bit = 1usize << (self.qubits - 1 - self.accept);
        (0..m.nrows()).filter(|i| i & bit != 0).map(|i| m[(i, i)]).sum()
    }

    fn embed(&self, advice_qubits: u32, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let anc = 1usize << (self.qubits - advice_qubits);
        let mut zero = DMatrix::zeros(anc, anc);
        zero[(0, 0)] = Complex64::new(1.0, 0.0);
        m.kronecker(&zero)
    }

    /// Exact `Pr[accept]` on input `x` with advice `rho` on the leading wires.
    pub fn accept_probability(&self, x: &[bool], rho: &DensityMatrix) -> Result<f64> {
        self.check_input(x)?;
        if rho.qubits() > self.qubits {
            return Err(invalid(format!(
                "advice has {} qubits but the circuit only {}",
                rho.qubits(),
                self.qubits
            )));
        }
        let mut m = self.embed(rho.qubits(), rho.matrix());
        self.evolve(x, &mut m);
        Ok(self.accept_mass(&m).re)
    }

    /// The operator `E` on the advice wires with `Pr[accept] = Re Tr(E ρ)`
    /// for every advice state `ρ`.
    pub fn effective_povm(&self, x: &[bool], advice_qubits: u32) -> Result<DMatrix<Complex64>> {
        self.check_input(x)?;
        if advice_qubits == 0 || advice_qubits > self.qubits {
            return Err(invalid("advice size must be between 1 and the circuit width"));
        }
        let dim = 1usize << advice_qubits;
        let mut e = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            for j in 0..dim {
                let mut unit = DMatrix::zeros(dim, dim);
                unit[(k, j)] = Complex64::new(1.0, 0.0);
                let mut m = self.embed(advice_qubits, &unit);
                self.evolve(x, &mut m);
                e[(j, k)] = self.accept_mass(&m);
            }
        }
        hermitize(&mut e);
        Ok(e)
    }

    /// Evolve a full-width state and return it (ancillas included).
    pub fn output_state(&self, x: &[bool], rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_input(x)?;
        if rho.qubits() > self.qubits {
            return Err(invalid("advice wider than the circuit"));
        }
        let mut m = self.embed(rho.qubits(), rho.matrix());
        self.evolve(x, &mut m);
        Ok(DensityMatrix::from_matrix_unchecked(self.qubits, m))
    }
}

fn apply_single(m: &mut DMatrix<Complex64>, qubits: u32, target: u32, u: &[[Complex64; 2]; 2]) {
    let dim = m.nrows();
    let mask = 1usize << (qubits - 1 - target);
    for col in 0..dim {
        for i in (0..dim).filter(|i| i & mask == 0) {
            let (a, b) = (m[(i, col)], m[(i | mask, col)]);
            m[(i, col)] = u[0][0] * a + u[0][1] * b;
            m[(i | mask, col)] = u[1][0] * a + u[1][1] * b;
        }
    }
    for row in 0..dim {
        for j in (0..dim).filter(|j| j & mask == 0) {
            let (a, b) = (m[(row, j)], m[(row, j | mask)]);
            m[(row, j)] = a * u[0][0].conj() + b * u[0][1].conj();
            m[(row, j | mask)] = a * u[1][0].conj() + b * u[1][1].conj();
        }
    }
}

fn apply_cnot(m: &mut DMatrix<Complex64>, qubits: u32, control: u32, target: u32) {
    let dim = m.nrows();
    let cm = 1usize << (qubits - 1 - control);
    let tm = 1usize << (qubits - 1 - target);
    let p = |i: usize| if i & cm != 0 { i ^ tm } else { i };
    let old = m.clone();
    for i in 0..dim {
        for j in 0..dim {
            m[(p(i), p(j))] = old[(i, j)];
        }
    }
}

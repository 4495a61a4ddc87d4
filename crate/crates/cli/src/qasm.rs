//! OpenQASM 2.0 emission and a parser for the subset the tools need.
//!
//! Register index `i` is qubit `i`, the leftmost character of a bitstring.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use walkprep::circuit::Mat2;
use walkprep::{Body, Circuit, Control, Gate};

use crate::CliError;

const EPS: f64 = 1e-14;

fn angle(x: f64) -> String {
    format!("{x:.17e}")
}

/// `(θ, φ, λ)` with `u = e^{iγ} U3(θ, φ, λ)` for some global phase `γ`.
pub fn u3_angles(u: &Mat2) -> (f64, f64, f64) {
    let theta = 2.0 * u[(1, 0)].norm().atan2(u[(0, 0)].norm());
    if u[(1, 0)].norm() < EPS {
        return (0.0, 0.0, u[(1, 1)].arg() - u[(0, 0)].arg());
    }
    if u[(0, 0)].norm() < EPS {
        let gamma = (-u[(0, 1)]).arg();
        return (theta, u[(1, 0)].arg() - gamma, 0.0);
    }
    let gamma = u[(0, 0)].arg();
    (theta, u[(1, 0)].arg() - gamma, (-u[(0, 1)]).arg() - gamma)
}

pub fn u3_matrix(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    Mat2::new(
        Complex64::new(c, 0.0),
        -Complex64::from_polar(s, lambda),
        Complex64::from_polar(s, phi),
        Complex64::from_polar(c, phi + lambda),
    )
}

/// OpenQASM 2.0 text for a lowered circuit, using x, cx, rx, ry, rz, u1
/// and u3 only. General bodies are emitted as u3, which drops a global phase.
pub fn emit_qasm(c: &Circuit) -> Result<String, CliError> {
    let mut out = String::new();
    writeln!(out, "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[{}];", c.n()).expect("string write");
    for g in c.gates() {
        let line = match g {
            Gate::X { qubit } => format!("x q[{qubit}];"),
            Gate::Cx { control, target } => format!("cx q[{control}],q[{target}];"),
            Gate::Controlled { controls, target, body } if controls.is_empty() => {
                let t = *target;
                match body {
                    Body::Rx(a) => format!("rx({}) q[{t}];", angle(*a)),
                    Body::Ry(a) => format!("ry({}) q[{t}];", angle(*a)),
                    Body::Rz(a) => format!("rz({}) q[{t}];", angle(*a)),
                    Body::P(a) => format!("u1({}) q[{t}];", angle(*a)),
                    other => {
                        let (th, ph, la) = u3_angles(&other.matrix());
                        format!("u3({},{},{}) q[{t}];", angle(th), angle(ph), angle(la))
                    }
                }
            }
            other => {
                return Err(CliError::Core(walkprep::Error::NotLowered(format!("{other:?}"))));
            }
        };
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

fn err(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Qasm { line, msg: msg.into() }
}

/// Parses OpenQASM 2.0 text. Accepts the standard qelib1 one-qubit gates,
/// cx, cz, swap, ccx and the controlled rotations; `barrier` and `creg` are
/// ignored.
pub fn parse_qasm(text: &str) -> Result<Circuit, CliError> {
    let mut stripped = String::with_capacity(text.len());
    let mut line_of = Vec::with_capacity(text.len());
    for (ln, line) in text.lines().enumerate() {
        let code = line.split("//").next().unwrap_or("");
        for ch in code.chars().chain(std::iter::once('\n')) {
            stripped.push(ch);
            line_of.push(ln + 1);
        }
    }

    let mut regs: HashMap<String, (usize, usize)> = HashMap::new();
    let mut n = 0usize;
    let mut gates: Vec<(usize, Gate)> = Vec::new();
    let mut header = false;
    let mut start = 0usize;
    let chars: Vec<char> = stripped.chars().collect();
    for (pos, &ch) in chars.iter().enumerate() {
        if ch != ';' {
            continue;
        }
        let stmt: String = chars[start..pos].iter().collect();
        let offset = chars[start..pos].iter().position(|c| !c.is_whitespace()).unwrap_or(0);
        let line = line_of[start + offset];
        start = pos + 1;
        let stmt = stmt.trim();
        if stmt.is_empty() {
            continue;
        }
        if let Some(rest) = stmt.strip_prefix("OPENQASM") {
            if rest.trim() != "2.0" {
                return Err(err(line, format!("unsupported version {}", rest.trim())));
            }
            header = true;
            continue;
        }
        if !header {
            return Err(err(line, "missing OPENQASM 2.0 header"));
        }
        if stmt.starts_with("include") || stmt.starts_with("barrier") || stmt.starts_with("creg") {
            continue;
        }
        if let Some(rest) = stmt.strip_prefix("qreg") {
            let (name, size) = parse_indexed(rest.trim()).ok_or_else(|| err(line, "malformed qreg"))?;
            if regs.insert(name.clone(), (n, size)).is_some() {
                return Err(err(line, format!("register {name} declared twice")));
            }
            n += size;
            continue;
        }
        gates.extend(parse_gate(stmt, &regs, line)?.into_iter().map(|g| (line, g)));
    }
    if !chars[start..].iter().all(|c| c.is_whitespace()) {
        let offset = chars[start..].iter().position(|c| !c.is_whitespace()).unwrap_or(0);
        return Err(err(line_of[start + offset], "statement without terminating ';'"));
    }
    if !header {
        return Err(err(1, "missing OPENQASM 2.0 header"));
    }
    let mut circuit = Circuit::new(n);
    for (line, g) in gates {
        circuit.push(g).map_err(|e| err(line, e.to_string()))?;
    }
    Ok(circuit)
}

fn parse_indexed(s: &str) -> Option<(String, usize)> {
    let open = s.find('[')?;
    let close = s.find(']')?;
    if close != s.len() - 1 || close < open {
        return None;
    }
    let name = s[..open].trim();
    if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
        return None;
    }
    Some((name.to_string(), s[open + 1..close].trim().parse().ok()?))
}

/// Qubit operands: `r[i]` or a whole register `r`.
fn parse_operand(s: &str, regs: &HashMap<String, (usize, usize)>, line: usize) -> Result<Vec<usize>, CliError> {
    let s = s.trim();
    if let Some((name, idx)) = parse_indexed(s) {
        let &(base, size) = regs
            .get(&name)
            .ok_or_else(|| err(line, format!("unknown register {name}")))?;
        if idx >= size {
            return Err(err(line, format!("index {idx} out of range for {name}[{size}]")));
        }
        return Ok(vec![base + idx]);
    }
    let &(base, size) = regs.get(s).ok_or_else(|| err(line, format!("unknown operand {s}")))?;
    Ok((base..base + size).collect())
}

fn parse_gate(stmt: &str, regs: &HashMap<String, (usize, usize)>, line: usize) -> Result<Vec<Gate>, CliError> {
    let name_end = stmt
        .find(|c: char| !(c.is_alphanumeric() || c == '_'))
        .unwrap_or(stmt.len());
    let name = &stmt[..name_end];
    let mut rest = stmt[name_end..].trim_start();
    let mut params = Vec::new();
    if rest.starts_with('(') {
        let close = rest.find(')').ok_or_else(|| err(line, "unclosed parameter list"))?;
        for p in rest[1..close].split(',') {
            params.push(eval(p).map_err(|m| err(line, m))?);
        }
        rest = &rest[close + 1..];
    }
    let operands: Vec<Vec<usize>> = rest
        .split(',')
        .map(|o| parse_operand(o, regs, line))
        .collect::<Result<_, _>>()?;
    let want_params = |k: usize| -> Result<(), CliError> {
        if params.len() == k {
            Ok(())
        } else {
            Err(err(line, format!("{name} takes {k} parameters, got {}", params.len())))
        }
    };
    let one = |body: Body| -> Result<Vec<Gate>, CliError> {
        if operands.len() != 1 {
            return Err(err(line, format!("{name} takes one operand")));
        }
        Ok(operands[0].iter().map(|&q| Gate::single(q, body)).collect())
    };
    let c = |re: f64, im: f64| Complex64::new(re, im);
    match name {
        "x" => {
            want_params(0)?;
            if operands.len() != 1 {
                return Err(err(line, "x takes one operand"));
            }
            Ok(operands[0].iter().map(|&q| Gate::x(q)).collect())
        }
        "id" => {
            want_params(0)?;
            one(Body::P(0.0)).map(|_| Vec::new())
        }
        "y" => {
            want_params(0)?;
            one(Body::U2(Mat2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))))
        }
        "z" => want_params(0).and_then(|_| one(Body::P(PI))),
        "h" => want_params(0).and_then(|_| one(Body::hadamard())),
        "s" => want_params(0).and_then(|_| one(Body::P(PI / 2.0))),
        "sdg" => want_params(0).and_then(|_| one(Body::P(-PI / 2.0))),
        "t" => want_params(0).and_then(|_| one(Body::P(PI / 4.0))),
        "tdg" => want_params(0).and_then(|_| one(Body::P(-PI / 4.0))),
        "sx" => {
            want_params(0)?;
            one(Body::U2(Mat2::new(
                c(0.5, 0.5),
                c(0.5, -0.5),
                c(0.5, -0.5),
                c(0.5, 0.5),
            )))
        }
        "rx" => want_params(1).and_then(|_| one(Body::Rx(params[0]))),
        "ry" => want_params(1).and_then(|_| one(Body::Ry(params[0]))),
        "rz" => want_params(1).and_then(|_| one(Body::Rz(params[0]))),
        "u1" | "p" => want_params(1).and_then(|_| one(Body::P(params[0]))),
        "u2" => want_params(2).and_then(|_| one(Body::U2(u3_matrix(PI / 2.0, params[0], params[1])))),
        "u3" | "u" | "U" => want_params(3).and_then(|_| one(Body::U2(u3_matrix(params[0], params[1], params[2])))),
        _ => {
            let qs: Vec<usize> = operands
                .iter()
                .map(|o| match o.as_slice() {
                    [q] => Ok(*q),
                    _ => Err(err(line, format!("{name} needs single-qubit operands"))),
                })
                .collect::<Result<_, _>>()?;
            let arity = |k: usize| -> Result<(), CliError> {
                if qs.len() == k {
                    Ok(())
                } else {
                    Err(err(line, format!("{name} takes {k} operands, got {}", qs.len())))
                }
            };
            let controlled = |ctl: &[usize], t: usize, body: Body| {
                Gate::controlled(ctl.iter().map(|&q| Control::new(q, true)).collect(), t, body)
                    .map_err(|e| err(line, e.to_string()))
            };
            let x = Body::U2(Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)));
            match name {
                "cx" | "CX" => {
                    want_params(0)?;
                    arity(2)?;
                    if qs[0] == qs[1] {
                        return Err(err(line, "cx control equals target"));
                    }
                    Ok(vec![Gate::cx(qs[0], qs[1])])
                }
                "cz" => want_params(0)
                    .and(arity(2))
                    .and_then(|_| Ok(vec![controlled(&qs[..1], qs[1], Body::P(PI))?])),
                "cp" | "cu1" => want_params(1)
                    .and(arity(2))
                    .and_then(|_| Ok(vec![controlled(&qs[..1], qs[1], Body::P(params[0]))?])),
                "crx" => want_params(1)
                    .and(arity(2))
                    .and_then(|_| Ok(vec![controlled(&qs[..1], qs[1], Body::Rx(params[0]))?])),
                "cry" => want_params(1)
                    .and(arity(2))
                    .and_then(|_| Ok(vec![controlled(&qs[..1], qs[1], Body::Ry(params[0]))?])),
                "crz" => want_params(1)
                    .and(arity(2))
                    .and_then(|_| Ok(vec![controlled(&qs[..1], qs[1], Body::Rz(params[0]))?])),
                "ccx" => want_params(0)
                    .and(arity(3))
                    .and_then(|_| Ok(vec![controlled(&qs[..2], qs[2], x)?])),
                "swap" => {
                    want_params(0)?;
                    arity(2)?;
                    let (a, b) = (qs[0], qs[1]);
                    Ok(vec![Gate::cx(a, b), Gate::cx(b, a), Gate::cx(a, b)])
                }
                _ => Err(err(line, format!("unsupported statement `{name}`"))),
            }
        }
    }
}

/// Evaluates a parameter expression: numbers, `pi`, `+ - * / ^`,
/// parentheses and sin, cos, tan, exp, ln, sqrt.
pub fn eval(src: &str) -> Result<f64, String> {
    let toks = tokenize(src)?;
    let mut p = ExprParser { toks: &toks, pos: 0 };
    let v = p.expr()?;
    if p.pos != toks.len() {
        return Err(format!("unexpected token in `{}`", src.trim()));
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Num(s.parse().map_err(|_| format!("bad number `{s}`"))?));
        } else if ch.is_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(ch) {
            out.push(Tok::Op(ch));
            i += 1;
        } else {
            return Err(format!("unexpected character `{ch}`"));
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    toks: &'a [Tok],
    pos: usize,
}

impl ExprParser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.toks.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<f64, String> {
        let mut v = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let r = self.term()?;
            v = if op == '+' { v + r } else { v - r };
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<f64, String> {
        let mut v = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let r = self.unary()?;
            v = if op == '*' { v * r } else { v / r };
        }
        Ok(v)
    }

    fn unary(&mut self) -> Result<f64, String> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<f64, String> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            return Ok(base.powf(self.unary()?));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<f64, String> {
        let tok = self.toks.get(self.pos).cloned().ok_or("unexpected end of expression")?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(v),
            Tok::Op('(') => {
                let v = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err("missing `)`".into());
                }
                self.pos += 1;
                Ok(v)
            }
            Tok::Ident(name) if name == "pi" => Ok(PI),
            Tok::Ident(name) => {
                let f: fn(f64) -> f64 = match name.as_str() {
                    "sin" => f64::sin,
                    "cos" => f64::cos,
                    "tan" => f64::tan,
                    "exp" => f64::exp,
                    "ln" => f64::ln,
                    "sqrt" => f64::sqrt,
                    _ => return Err(format!("unknown identifier `{name}`")),
                };
                if self.peek_op() != Some('(') {
                    return Err(format!("`{name}` needs an argument"));
                }
                self.pos += 1;
                let v = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err("missing `)`".into());
                }
                self.pos += 1;
                Ok(f(v))
            }
            Tok::Op(c) => Err(format!("unexpected `{c}`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use walkprep::sim::{circuit_unitary, max_abs_diff_up_to_phase};

    #[test]
    fn expressions() {
        assert_eq!(eval("1").unwrap(), 1.0);
        assert!((eval("-pi/2").unwrap() + PI / 2.0).abs() < 1e-15);
        assert!((eval("2*(3+4)^2").unwrap() - 98.0).abs() < 1e-12);
        assert!((eval("cos(0) + 1.5e-1").unwrap() - 1.15).abs() < 1e-15);
        assert!((eval("-2^2").unwrap() + 4.0).abs() < 1e-15);
        assert!(eval("1 +").is_err());
        assert!(eval("foo").is_err());
    }

    #[test]
    fn empty_circuit_header() {
        let text = emit_qasm(&Circuit::new(2)).unwrap();
        assert_eq!(text, "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\n");
        assert_eq!(parse_qasm(&text).unwrap(), Circuit::new(2));
    }

    #[test]
    fn x_line() {
        let c = Circuit::from_gates(3, [Gate::x(0)]).unwrap();
        assert!(emit_qasm(&c).unwrap().ends_with("qreg q[3];\nx q[0];\n"));
    }

    #[test]
    fn u3_extraction() {
        let cases = [
            Body::hadamard().matrix(),
            Body::Rx(0.3).matrix(),
            Body::P(1.1).matrix(),
            Mat2::new(
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
            ),
            Body::Su2 {
                alpha: Complex64::new(0.6, 0.0),
                beta: Complex64::new(0.0, 0.8),
            }
            .matrix(),
        ];
        for u in cases {
            let (t, p, l) = u3_angles(&u);
            let back = u3_matrix(t, p, l);
            let c1 = Circuit::from_gates(1, [Gate::single(0, Body::U2(u))]).unwrap();
            let c2 = Circuit::from_gates(1, [Gate::single(0, Body::U2(back))]).unwrap();
            let d = max_abs_diff_up_to_phase(&circuit_unitary(&c1).unwrap(), &circuit_unitary(&c2).unwrap());
            assert!(d < 1e-12, "{u}");
        }
    }

    #[test]
    fn parse_errors_carry_lines() {
        let text = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\nh q[0];\nfoo q[1];\n";
        match parse_qasm(text) {
            Err(CliError::Qasm { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
        let text = "OPENQASM 2.0;\nqreg q[2];\n\ncx q[0],q[2];\n";
        assert!(matches!(parse_qasm(text), Err(CliError::Qasm { line: 4, .. })));
        assert!(matches!(parse_qasm("qreg q[1];"), Err(CliError::Qasm { line: 1, .. })));
        assert!(matches!(
            parse_qasm("OPENQASM 2.0;\nqreg q[1];\nx q[0]"),
            Err(CliError::Qasm { line: 3, .. })
        ));
    }

    #[test]
    fn broadcast_and_comments() {
        let text = "OPENQASM 2.0; // header\nqreg a[1];\nqreg b[2];\ncreg c[3];\nh b; barrier a,b;\ncx a[0], b[1];\n";
        let c = parse_qasm(text).unwrap();
        assert_eq!(c.n(), 3);
        assert_eq!(c.len(), 3);
        assert_eq!(c.gates()[2], Gate::cx(0, 2));
    }
}

//! Parser and emitter for the QASM subset used as the on-disk circuit format.
//!
//! Grammar, one statement per line:
//!
//! ```text
//! qreg q[N];            // header, must come first
//! <gate> q[i];          // h x y z s sdg
//! <gate>(<float>) q[i]; // rx ry rz
//! cx q[i],q[j];
//! measure q[i];
//! ```
//!
//! `//` starts a comment. Register names other than `q` are rejected;
//! logical qubits are dense indices into that single register.

use crate::circuit::{Circuit, Gate, GateKind};
use crate::{Error, Result};

pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = match raw.find("//") {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        if content.trim().is_empty() {
            continue;
        }
        // Statements are `;`-terminated; several may share a line.
        let mut pieces = content.split(';').collect::<Vec<_>>();
        let tail = pieces.pop().unwrap_or("");
        if !tail.trim().is_empty() {
            return Err(err(line, "missing trailing `;`"));
        }
        for piece in pieces {
            let stmt = piece.trim();
            if stmt.is_empty() {
                continue;
            }
            parse_statement(stmt, line, &mut circuit)?;
        }
    }
    let circuit = circuit.ok_or_else(|| err(0, "empty program: missing `qreg q[N];`"))?;
    circuit.validate()?;
    Ok(circuit)
}

fn parse_statement(stmt: &str, line: usize, circuit: &mut Option<Circuit>) -> Result<()> {
    if let Some(rest) = stmt.strip_prefix("qreg") {
        if circuit.is_some() {
            return Err(err(line, "duplicate qreg declaration"));
        }
        let n = parse_qreg(rest.trim(), line)?;
        *circuit = Some(Circuit::new("qasm", n));
        return Ok(());
    }

    let circuit = circuit
        .as_mut()
        .ok_or_else(|| err(line, "statement before `qreg q[N];` header"))?;
    let gate = parse_gate(stmt, line, circuit.num_qubits)?;
    // Reject double measurement and gates arriving after their wire's
    // measurement right away so the error carries the line number.
    for &q in &gate.qubits {
        if circuit
            .gates
            .iter()
            .any(|g| g.kind == GateKind::Measure && g.qubits[0] == q)
        {
            if gate.kind == GateKind::Measure {
                return Err(err(line, &format!("qubit {q} measured twice")));
            }
            return Err(err(line, &format!("gate on qubit {q} after its measurement")));
        }
    }
    circuit.push(gate);
    Ok(())
}

fn parse_qreg(rest: &str, line: usize) -> Result<usize> {
    let inner = rest
        .strip_prefix("q[")
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| err(line, "expected `qreg q[N];`"))?;
    let n: usize = inner
        .trim()
        .parse()
        .map_err(|_| err(line, &format!("invalid register size `{inner}`")))?;
    if n == 0 {
        return Err(err(line, "register size must be positive"));
    }
    Ok(n)
}

fn parse_gate(stmt: &str, line: usize, num_qubits: usize) -> Result<Gate> {
    let (head, args) = stmt
        .split_once(char::is_whitespace)
        .ok_or_else(|| err(line, "expected `<gate> q[i];`"))?;
    let head = head.trim();
    let args = args.trim();

    let (name, param) = match head.split_once('(') {
        Some((name, rest)) => {
            let angle_text = rest
                .strip_suffix(')')
                .ok_or_else(|| err(line, "unclosed `(` in gate parameter"))?;
            let angle: f64 = angle_text
                .trim()
                .parse()
                .map_err(|_| err(line, &format!("invalid angle `{angle_text}`")))?;
            (name, Some(angle))
        }
        None => (head, None),
    };

    let kind = GateKind::from_name(name)
        .ok_or_else(|| err(line, &format!("unknown gate `{name}`")))?;
    if kind.is_rotation() != param.is_some() {
        return Err(err(
            line,
            &format!("gate `{name}` {} an angle parameter", if kind.is_rotation() { "requires" } else { "does not take" }),
        ));
    }

    let mut qubits = Vec::new();
    for arg in args.split(',') {
        qubits.push(parse_qubit_ref(arg.trim(), line, num_qubits)?);
    }
    let expected = if kind.is_two_qubit() { 2 } else { 1 };
    if qubits.len() != expected {
        return Err(err(
            line,
            &format!("gate `{name}` expects {expected} operand(s), got {}", qubits.len()),
        ));
    }
    if expected == 2 && qubits[0] == qubits[1] {
        return Err(err(line, "cx operands must be distinct"));
    }
    Ok(Gate { kind, qubits, param })
}

fn parse_qubit_ref(arg: &str, line: usize, num_qubits: usize) -> Result<usize> {
    let inner = arg
        .strip_prefix("q[")
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| err(line, &format!("expected `q[i]`, got `{arg}`")))?;
    let idx: usize = inner
        .trim()
        .parse()
        .map_err(|_| err(line, &format!("invalid qubit index `{inner}`")))?;
    if idx >= num_qubits {
        return Err(err(
            line,
            &format!("qubit index {idx} out of range for qreg q[{num_qubits}]"),
        ));
    }
    Ok(idx)
}

fn err(line: usize, msg: &str) -> Error {
    Error::Parse { line, msg: msg.to_string() }
}

/// Canonical emission; floats use the shortest representation that parses
/// back to the same value, so emit/parse round-trips exactly.
pub fn emit_qasm(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str(&format!("qreg q[{}];\n", circuit.num_qubits));
    for gate in &circuit.gates {
        match gate.kind {
            GateKind::Cx => {
                out.push_str(&format!("cx q[{}],q[{}];\n", gate.qubits[0], gate.qubits[1]))
            }
            _ => match gate.param {
                Some(angle) => out.push_str(&format!(
                    "{}({}) q[{}];\n",
                    gate.kind.name(),
                    angle,
                    gate.qubits[0]
                )),
                None => {
                    out.push_str(&format!("{} q[{}];\n", gate.kind.name(), gate.qubits[0]))
                }
            },
        }
    }
    out
}

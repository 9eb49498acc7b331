//! Minimal CPLEX-LP-format grammar check, independent of the emitter.
//!
//! Accepts the subset the encoder produces: a `Minimize` objective (linear
//! terms plus an optional `[ ... ] / 2` quadratic block), `Subject To`
//! constraints, optional `Bounds`, a `Binaries` list, and `End`.

#![allow(dead_code)]

#[derive(Debug, Default)]
pub struct LpFile {
    pub objective_terms: usize,
    pub quadratic_terms: usize,
    pub constraints: usize,
    pub bounds: usize,
    pub binaries: usize,
}

fn is_var_name(tok: &str) -> bool {
    let mut chars = tok.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_number(tok: &str) -> bool {
    tok.parse::<f64>().is_ok()
}

/// Tokenized expression parser: `[+|-] [number] var [^2] ...`.
/// Returns (linear terms, quadratic terms) or an error.
fn parse_terms(tokens: &[&str], allow_quadratic: bool) -> Result<(usize, usize), String> {
    let mut linear = 0usize;
    let mut quadratic = 0usize;
    let mut i = 0usize;
    let mut in_block = false;
    while i < tokens.len() {
        match tokens[i] {
            "[" => {
                if !allow_quadratic || in_block {
                    return Err("unexpected '['".into());
                }
                in_block = true;
                i += 1;
            }
            "]" => {
                if !in_block {
                    return Err("unexpected ']'".into());
                }
                // expect "/ 2"
                if tokens.get(i + 1) != Some(&"/") || tokens.get(i + 2) != Some(&"2") {
                    return Err("quadratic block must end with '] / 2'".into());
                }
                in_block = false;
                i += 3;
            }
            t => {
                let mut j = i;
                if t == "+" || t == "-" {
                    j += 1;
                }
                let Some(&num_or_var) = tokens.get(j) else {
                    return Err("dangling sign".into());
                };
                if is_number(num_or_var) {
                    j += 1;
                }
                let Some(&var) = tokens.get(j) else {
                    return Err("term missing a variable".into());
                };
                if !is_var_name(var) {
                    return Err(format!("expected a variable name, got `{var}`"));
                }
                j += 1;
                if tokens.get(j) == Some(&"^2") {
                    if !in_block {
                        return Err("squared term outside the quadratic block".into());
                    }
                    quadratic += 1;
                    j += 1;
                } else if in_block {
                    return Err("non-squared term inside the quadratic block".into());
                } else {
                    linear += 1;
                }
                i = j;
            }
        }
    }
    if in_block {
        return Err("unterminated quadratic block".into());
    }
    Ok((linear, quadratic))
}

pub fn parse_lp(text: &str) -> Result<LpFile, String> {
    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        Preamble,
        Objective,
        Constraints,
        Bounds,
        Binaries,
        End,
    }
    let mut section = Section::Preamble;
    let mut out = LpFile::default();
    // the objective may span logical lines; collect until "Subject To"
    let mut objective_buf = String::new();

    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        let lower = line.to_ascii_lowercase();
        let new_section = match lower.as_str() {
            "minimize" | "maximize" => Some(Section::Objective),
            "subject to" | "st" | "s.t." => Some(Section::Constraints),
            "bounds" => Some(Section::Bounds),
            "binaries" | "binary" => Some(Section::Binaries),
            "end" => Some(Section::End),
            _ => None,
        };
        if let Some(s) = new_section {
            if s == Section::Constraints {
                let buf = objective_buf.trim();
                let body = buf
                    .strip_prefix("obj:")
                    .ok_or_else(|| "objective must be named obj".to_string())?;
                let tokens: Vec<&str> = body.split_whitespace().collect();
                let (lin, quad) = parse_terms(&tokens, true)?;
                if lin + quad == 0 {
                    return Err("empty objective".into());
                }
                out.objective_terms = lin;
                out.quadratic_terms = quad;
            }
            section = s;
            continue;
        }
        match section {
            Section::Preamble => return Err(format!("unexpected line before Minimize: {line}")),
            Section::Objective => {
                objective_buf.push(' ');
                objective_buf.push_str(line);
            }
            Section::Constraints => {
                let (name, rest) = line
                    .split_once(':')
                    .ok_or_else(|| format!("constraint missing name: {line}"))?;
                if !is_var_name(name.trim()) {
                    return Err(format!("bad constraint name `{name}`"));
                }
                let tokens: Vec<&str> = rest.split_whitespace().collect();
                let sense_pos = tokens
                    .iter()
                    .position(|t| matches!(*t, "<=" | ">=" | "=" | "<" | ">"))
                    .ok_or_else(|| format!("constraint missing sense: {line}"))?;
                let (terms, quad) = parse_terms(&tokens[..sense_pos], false)?;
                if terms == 0 || quad != 0 {
                    return Err(format!("constraint needs linear terms: {line}"));
                }
                if tokens.len() != sense_pos + 2 || !is_number(tokens[sense_pos + 1]) {
                    return Err(format!("constraint needs a numeric rhs: {line}"));
                }
                out.constraints += 1;
            }
            Section::Bounds => {
                let tokens: Vec<&str> = line.split_whitespace().collect();
                // accept `var = number` and `number <= var <= number`
                let ok = match tokens.as_slice() {
                    [v, "=", n] => is_var_name(v) && is_number(n),
                    [a, "<=", v, "<=", b] => {
                        is_number(a) && is_var_name(v) && is_number(b)
                    }
                    _ => false,
                };
                if !ok {
                    return Err(format!("bad bounds line: {line}"));
                }
                out.bounds += 1;
            }
            Section::Binaries => {
                for tok in line.split_whitespace() {
                    if !is_var_name(tok) {
                        return Err(format!("bad binary variable `{tok}`"));
                    }
                    out.binaries += 1;
                }
            }
            Section::End => return Err(format!("content after End: {line}")),
        }
    }
    if section != Section::End {
        return Err("missing End".into());
    }
    Ok(out)
}

#[test]
fn parses_a_small_handwritten_file() {
    let text = "\\ comment\nMinimize\n obj: + 1 b\nSubject To\n c1: + 1 p_0_0 - 1 p_0_1 <= 0\n\
                 one_leaf_0: + 1 z_0_1 + 1 z_0_2 = 1\nBounds\n dinc_3 = 0\nBinaries\n p_0_0\n p_0_1\nEnd\n";
    let lp = parse_lp(text).unwrap();
    assert_eq!(lp.objective_terms, 1);
    assert_eq!(lp.constraints, 2);
    assert_eq!(lp.bounds, 1);
    assert_eq!(lp.binaries, 2);
}

#[test]
fn rejects_missing_end() {
    assert!(parse_lp("Minimize\n obj: + 1 b\nSubject To\n c: + 1 b >= 0\n").is_err());
}

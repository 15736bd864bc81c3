//! IR text format.
//!
//! ```text
//! var speed : numeric[km/h]
//! var belt : enum{fastened,unfastened}
//! var chime : bool
//!
//! (implies (or (>= speed 10) (= belt unfastened)) chime)
//! ```
//!
//! Header lines declare variables in order; `#` starts a comment line in the
//! header. After the header comes exactly one S-expression formula.

use super::{normalize, Atom, CmpOp, Formula, IrError, Operand, Signature, Sort};
use crate::sexpr::{self, Pos, SExpr};

const WIDTH: usize = 88;

/// Renders the normalized formula with its signature.
pub fn serialize_ir(f: &Formula, sig: &Signature) -> String {
    let mut out = String::new();
    for d in sig.decls() {
        out.push_str(&format!("var {} : {}\n", d.name, d.sort));
    }
    out.push('\n');
    pretty(&normalize(f), 0, &mut out);
    out.push('\n');
    out
}

fn pretty(f: &Formula, indent: usize, out: &mut String) {
    let flat = f.to_string();
    if indent + flat.len() <= WIDTH {
        out.push_str(&flat);
        return;
    }
    let (head, children): (&str, Vec<&Formula>) = match f {
        Formula::Atom(_) => {
            out.push_str(&flat);
            return;
        }
        Formula::Not(g) => ("not", vec![g]),
        Formula::And(cs) => ("and", cs.iter().collect()),
        Formula::Or(cs) => ("or", cs.iter().collect()),
        Formula::Implies(l, r) => ("implies", vec![l, r]),
        Formula::Iff(l, r) => ("iff", vec![l, r]),
    };
    out.push('(');
    out.push_str(head);
    for c in children {
        out.push('\n');
        out.push_str(&" ".repeat(indent + 2));
        pretty(c, indent + 2, out);
    }
    out.push(')');
}

/// Parses an IR file back into its formula and signature.
pub fn parse_ir(text: &str) -> Result<(Formula, Signature), IrError> {
    let mut sig = Signature::new();
    let mut body_start = None;
    let mut offset = 0;
    for (idx, line) in text.split_inclusive('\n').enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            offset += line.len();
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("var ") {
            parse_decl(rest, line_no, &mut sig)?;
            offset += line.len();
            continue;
        }
        body_start = Some((offset, line_no));
        break;
    }
    let Some((offset, line_no)) = body_start else {
        return Err(malformed(
            text.lines().count().max(1),
            1,
            "missing formula".into(),
        ));
    };

    let exprs = sexpr::read_all(&text[offset..], Pos { line: line_no, column: 1 })
        .map_err(|e| malformed(e.pos.line, e.pos.column, e.message))?;
    match exprs.as_slice() {
        [single] => {
            let f = formula_from_sexpr(single, &sig)?;
            Ok((f, sig))
        }
        [_, extra, ..] => Err(malformed(
            extra.pos().line,
            extra.pos().column,
            "trailing content after formula".into(),
        )),
        [] => Err(malformed(line_no, 1, "missing formula".into())),
    }
}

fn malformed(line: usize, column: usize, message: String) -> IrError {
    IrError::Malformed {
        line,
        column,
        message,
    }
}

fn parse_decl(rest: &str, line: usize, sig: &mut Signature) -> Result<(), IrError> {
    let Some((name, sort)) = rest.split_once(':') else {
        return Err(malformed(line, 1, "expected `var <name> : <sort>`".into()));
    };
    let name = name.trim();
    let sort = parse_sort(sort.trim()).ok_or_else(|| {
        malformed(line, 1, format!("unknown sort `{}`", sort.trim()))
    })?;
    sig.declare(name, sort)
        .map_err(|e| malformed(line, 1, e.to_string()))
}

fn parse_sort(text: &str) -> Option<Sort> {
    if text == "bool" {
        return Some(Sort::Bool);
    }
    if text == "numeric" || text == "numeric[]" {
        return Some(Sort::numeric());
    }
    if let Some(unit) = text
        .strip_prefix("numeric[")
        .and_then(|r| r.strip_suffix(']'))
    {
        return Some(Sort::numeric_with_unit(unit.trim()));
    }
    let inner = text.strip_prefix("enum{")?.strip_suffix('}')?;
    Sort::enumeration(inner.split(',').map(str::trim)).ok()
}

/// Builds a formula from an S-expression, resolving atoms against `sig`.
pub(crate) fn formula_from_sexpr(e: &SExpr, sig: &Signature) -> Result<Formula, IrError> {
    let err = |pos: Pos, message: String| malformed(pos.line, pos.column, message);
    match e {
        SExpr::Symbol(..) => Ok(Formula::Atom(atom_from_sexpr(e, sig)?)),
        SExpr::List(items, pos) => {
            let Some(SExpr::Symbol(head, _)) = items.first() else {
                return Err(err(*pos, "expected an operator".into()));
            };
            let args = &items[1..];
            let sub = |i: usize| formula_from_sexpr(&args[i], sig);
            match head.as_str() {
                "not" if args.len() == 1 => Ok(Formula::not(sub(0)?)),
                "and" | "or" if args.len() >= 2 => {
                    let cs = args
                        .iter()
                        .map(|a| formula_from_sexpr(a, sig))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(if head == "and" {
                        Formula::And(cs)
                    } else {
                        Formula::Or(cs)
                    })
                }
                "implies" if args.len() == 2 => Ok(Formula::implies(sub(0)?, sub(1)?)),
                "iff" if args.len() == 2 => Ok(Formula::iff(sub(0)?, sub(1)?)),
                "not" | "and" | "or" | "implies" | "iff" => {
                    Err(err(*pos, format!("wrong number of operands for `{head}`")))
                }
                _ => Ok(Formula::Atom(atom_from_sexpr(e, sig)?)),
            }
        }
    }
}

/// Resolves `name`, `(= var value)` and `(<op> var rhs)` against `sig`.
pub(crate) fn atom_from_sexpr(e: &SExpr, sig: &Signature) -> Result<Atom, IrError> {
    let err = |pos: Pos, message: String| malformed(pos.line, pos.column, message);
    let declared = |name: &str, pos: Pos| {
        sig.get(name)
            .ok_or_else(|| err(pos, format!("undeclared variable `{name}`")))
    };
    match e {
        SExpr::Symbol(name, pos) => match declared(name, *pos)? {
            Sort::Bool => Ok(Atom::BoolVar(name.clone())),
            other => Err(err(*pos, format!("`{name}` is {other}, not bool"))),
        },
        SExpr::List(items, pos) => {
            let [SExpr::Symbol(op, _), SExpr::Symbol(var, var_pos), SExpr::Symbol(rhs, rhs_pos)] =
                items.as_slice()
            else {
                return Err(err(*pos, format!("unrecognised atom `{e}`")));
            };
            let op = CmpOp::from_symbol(op)
                .ok_or_else(|| err(*pos, format!("unknown operator `{op}`")))?;
            match declared(var, *var_pos)? {
                Sort::Enum(values) => {
                    if op != CmpOp::Eq {
                        return Err(err(*pos, format!("enum `{var}` only supports `=`")));
                    }
                    if !values.contains(rhs) {
                        return Err(err(
                            *rhs_pos,
                            format!("`{rhs}` is not a value of `{var}`"),
                        ));
                    }
                    Ok(Atom::EnumEq {
                        var: var.clone(),
                        value: rhs.clone(),
                    })
                }
                Sort::Numeric { .. } => {
                    let rhs = match rhs.parse::<i64>() {
                        Ok(c) => Operand::Const(c),
                        Err(_) => match declared(rhs, *rhs_pos)? {
                            Sort::Numeric { .. } => Operand::Var(rhs.clone()),
                            other => {
                                return Err(err(
                                    *rhs_pos,
                                    format!("`{rhs}` is {other}, not numeric"),
                                ))
                            }
                        },
                    };
                    Ok(Atom::NumCmp {
                        var: var.clone(),
                        op,
                        rhs,
                    })
                }
                Sort::Bool => Err(err(
                    *var_pos,
                    format!("`{var}` is bool; write it as a bare atom"),
                )),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (Formula, Signature) {
        let sig = Signature::new()
            .with("speed", Sort::numeric_with_unit("km/h"))
            .unwrap()
            .with("belt", Sort::enumeration(["fastened", "unfastened"]).unwrap())
            .unwrap()
            .with("chime", Sort::Bool)
            .unwrap();
        let f = Formula::implies(
            Formula::or(vec![
                Formula::cmp_const("speed", CmpOp::Ge, 10),
                Formula::enum_eq("belt", "unfastened"),
            ]),
            Formula::bool_var("chime"),
        );
        (f, sig)
    }

    #[test]
    fn round_trip() {
        let (f, sig) = sample();
        let text = serialize_ir(&f, &sig);
        assert!(text.starts_with("var speed : numeric[km/h]\n"));
        let (g, sig2) = parse_ir(&text).unwrap();
        assert_eq!(g, normalize(&f));
        assert_eq!(sig2, sig);
    }

    #[test]
    fn empty_input_is_malformed() {
        assert_eq!(parse_ir("").unwrap_err().code(), "MALFORMED_IR");
        assert_eq!(parse_ir("\n\n").unwrap_err().code(), "MALFORMED_IR");
    }

    #[test]
    fn undeclared_variable_is_named() {
        let (f, sig) = sample();
        let text = serialize_ir(&f, &sig).replace("var chime : bool\n", "");
        let err = parse_ir(&text).unwrap_err();
        assert_eq!(err.code(), "MALFORMED_IR");
        assert!(err.to_string().contains("chime"), "{err}");
    }

    #[test]
    fn rejects_trailing_and_bad_arity() {
        let (f, sig) = sample();
        let text = serialize_ir(&f, &sig) + "chime\n";
        assert!(parse_ir(&text).is_err());
        assert!(parse_ir("var a : bool\n\n(and a)\n").is_err());
        assert!(parse_ir("var a : bool\n\n(implies a)\n").is_err());
    }

    #[test]
    fn numeric_var_vs_var_and_enum_errors() {
        let text = "var x : numeric\nvar y : numeric\nvar e : enum{a,b}\n\n(and (< x y) (= e a))\n";
        let (f, _) = parse_ir(text).unwrap();
        assert_eq!(
            f,
            Formula::And(vec![
                Formula::cmp_var("x", CmpOp::Lt, "y"),
                Formula::enum_eq("e", "a")
            ])
        );
        assert!(parse_ir("var e : enum{a,b}\n\n(= e c)\n").is_err());
        assert!(parse_ir("var e : enum{a,b}\n\n(< e a)\n").is_err());
    }

    #[test]
    fn long_formulas_are_wrapped_but_reparse() {
        let mut sig = Signature::new();
        let mut cs = Vec::new();
        for i in 0..12 {
            let name = format!("signal_number_{i}");
            sig.declare(name.as_str(), Sort::Bool).unwrap();
            cs.push(Formula::bool_var(&name));
        }
        let f = Formula::implies(Formula::And(cs[..11].to_vec()), cs[11].clone());
        let text = serialize_ir(&f, &sig);
        assert!(text.lines().count() > sig.len() + 2);
        assert_eq!(parse_ir(&text).unwrap().0, normalize(&f));
    }
}

//! Minimal ordered document model for the structured output format.
//!
//! Fields keep insertion order, so renderings are stable across runs. The
//! serialized form is JSON.

use std::fmt::Write;

#[derive(Clone, Debug, PartialEq)]
pub enum Doc {
    Str(String),
    Int(i64),
    UInt(u64),
    Bool(bool),
    Arr(Vec<Doc>),
    Obj(Vec<(String, Doc)>),
}

impl Doc {
    pub fn obj() -> Doc {
        Doc::Obj(Vec::new())
    }

    pub fn field(mut self, key: &str, value: Doc) -> Doc {
        if let Doc::Obj(fields) = &mut self {
            fields.push((key.to_string(), value));
        }
        self
    }

    pub fn str(s: impl Into<String>) -> Doc {
        Doc::Str(s.into())
    }

    pub fn arr<I: IntoIterator<Item = Doc>>(items: I) -> Doc {
        Doc::Arr(items.into_iter().collect())
    }

    pub fn to_json(&self) -> String {
        let mut out = String::new();
        self.write_json(&mut out, 0);
        out.push('\n');
        out
    }

    fn write_json(&self, out: &mut String, indent: usize) {
        match self {
            Doc::Str(s) => {
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        '\t' => out.push_str("\\t"),
                        '\r' => out.push_str("\\r"),
                        c if (c as u32) < 0x20 => {
                            let _ = write!(out, "\\u{:04x}", c as u32);
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Doc::Int(n) => {
                let _ = write!(out, "{n}");
            }
            Doc::UInt(n) => {
                let _ = write!(out, "{n}");
            }
            Doc::Bool(b) => {
                let _ = write!(out, "{b}");
            }
            Doc::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    item.write_json(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push(']');
            }
            Doc::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (k, v)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    Doc::Str(k.clone()).write_json(out, indent + 1);
                    out.push_str(": ");
                    v.write_json(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push('}');
            }
        }
    }
}

fn push_indent(out: &mut String, n: usize) {
    for _ in 0..n {
        out.push_str("  ");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_order_and_escaping() {
        let d = Doc::obj()
            .field("b", Doc::Int(1))
            .field("a", Doc::str("x\"y"))
            .field("list", Doc::arr([Doc::Bool(true), Doc::UInt(2)]));
        let json = d.to_json();
        let b = json.find("\"b\"").unwrap();
        let a = json.find("\"a\"").unwrap();
        assert!(b < a, "insertion order is preserved");
        assert!(json.contains("x\\\"y"));
    }
}

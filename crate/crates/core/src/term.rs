//! Textual and JSON forms of [`Structure`].
//!
//! Text: `E | Z[label] | U<i>(s) | P(..) | S(..) | M(..) | PS(..) | C(..)`.
//! JSON: `{"k":"Z","l":"z"}`, `{"k":"U","i":0,"c":[s]}`, `{"k":"P","c":[..]}`,
//! with kinds `E`, `Z`, `U`, `P`, `S`, `M`, `PS`, `C`.

use std::str::FromStr;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grammar::Structure;

struct Reader<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn fail<T>(&self, what: &str) -> Result<T> {
        Err(Error::Term(format!("{what} at offset {}", self.pos)))
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            self.fail(&format!("expected '{s}'"))
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest.find(|c| !f(c)).unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn list(&mut self) -> Result<Vec<Structure>> {
        self.expect("(")?;
        let mut items = Vec::new();
        if self.eat(")") {
            return Ok(items);
        }
        loop {
            items.push(self.structure()?);
            if self.eat(")") {
                return Ok(items);
            }
            self.expect(",")?;
        }
    }

    fn structure(&mut self) -> Result<Structure> {
        self.skip_ws();
        if self.eat("PS") {
            return Ok(Structure::PSet(self.list()?));
        }
        if self.eat("Z") {
            self.expect("[")?;
            let label = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
            if label.is_empty() {
                return self.fail("expected atom label");
            }
            let label = label.to_string();
            self.expect("]")?;
            return Ok(Structure::Atom(label));
        }
        if self.eat("U") {
            let digits = self.take_while(|c| c.is_ascii_digit());
            let Ok(i) = digits.parse() else {
                return self.fail("expected branch index");
            };
            self.expect("(")?;
            let child = self.structure()?;
            self.expect(")")?;
            return Ok(Structure::Union(i, Box::new(child)));
        }
        if self.eat("E") {
            return Ok(Structure::Epsilon);
        }
        for (tag, make) in [
            ("P", Structure::Prod as fn(Vec<Structure>) -> Structure),
            ("S", Structure::Seq),
            ("M", Structure::MSet),
            ("C", Structure::Cycle),
        ] {
            if self.eat(tag) {
                return Ok(make(self.list()?));
            }
        }
        self.fail("expected a structure")
    }
}

impl FromStr for Structure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Structure> {
        let mut r = Reader { src: s, pos: 0 };
        let out = r.structure()?;
        r.skip_ws();
        if r.pos != s.len() {
            return r.fail("trailing input");
        }
        Ok(out)
    }
}

pub fn to_json(s: &Structure) -> Value {
    let kids = |c: &[Structure]| Value::Array(c.iter().map(to_json).collect());
    match s {
        Structure::Epsilon => json!({"k": "E"}),
        Structure::Atom(l) => json!({"k": "Z", "l": l}),
        Structure::Union(i, c) => json!({"k": "U", "i": i, "c": [to_json(c)]}),
        Structure::Prod(c) => json!({"k": "P", "c": kids(c)}),
        Structure::Seq(c) => json!({"k": "S", "c": kids(c)}),
        Structure::MSet(c) => json!({"k": "M", "c": kids(c)}),
        Structure::PSet(c) => json!({"k": "PS", "c": kids(c)}),
        Structure::Cycle(c) => json!({"k": "C", "c": kids(c)}),
    }
}

pub fn from_json(v: &Value) -> Result<Structure> {
    let bad = |why: &str| Error::Term(format!("{why} in {v}"));
    let kind = v.get("k").and_then(Value::as_str).ok_or_else(|| bad("missing kind"))?;
    let children = || -> Result<Vec<Structure>> {
        v.get("c")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing children"))?
            .iter()
            .map(from_json)
            .collect()
    };
    Ok(match kind {
        "E" => Structure::Epsilon,
        "Z" => Structure::Atom(v.get("l").and_then(Value::as_str).ok_or_else(|| bad("missing label"))?.to_string()),
        "U" => {
            let i = v.get("i").and_then(Value::as_u64).ok_or_else(|| bad("missing branch index"))?;
            let mut c = children()?;
            if c.len() != 1 {
                return Err(bad("union needs exactly one child"));
            }
            Structure::Union(i as usize, Box::new(c.remove(0)))
        }
        "P" => Structure::Prod(children()?),
        "S" => Structure::Seq(children()?),
        "M" => Structure::MSet(children()?),
        "PS" => Structure::PSet(children()?),
        "C" => Structure::Cycle(children()?),
        other => return Err(bad(&format!("unknown kind {other}"))),
    })
}

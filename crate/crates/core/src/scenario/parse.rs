//! Lexical layer of the scenario format.
//!
//! Grammar, line oriented:
//!
//! ```text
//! line    := ws* (binding | comment)? ws*
//! binding := path ws* '=' ws* value (ws+ comment)?
//! path    := segment ('.' segment)*
//! segment := [A-Za-z0-9_]+
//! value   := integer | decimal | boolean | quoted string | '[' values ']'
//! comment := '#' anything
//! ```
//!
//! Positions reported in errors are 1-based line and column over characters.

use super::ScenarioError;

/// One `path = value` binding with its source position.
#[derive(Clone, Debug, PartialEq)]
pub struct Binding {
    pub path: String,
    pub segments: Vec<String>,
    pub value: Value,
    pub line: u32,
    pub col: u32,
}

/// A parsed scalar or list value.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i128),
    Dec(f64),
    Bool(bool),
    Str(String),
    List(Vec<Value>),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "integer",
            Value::Dec(_) => "decimal",
            Value::Bool(_) => "boolean",
            Value::Str(_) => "string",
            Value::List(_) => "list",
        }
    }
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: u32,
}

impl Cursor {
    fn col(&self) -> u32 {
        self.pos as u32 + 1
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c == ' ' || c == '\t' || c == '\r') {
            self.pos += 1;
        }
    }

    fn error(&self, col: u32, message: impl Into<String>) -> ScenarioError {
        ScenarioError::Syntax {
            line: self.line,
            col,
            message: message.into(),
        }
    }
}

/// Parse a whole document into bindings, in source order.
pub fn parse_document(text: &str) -> Result<Vec<Binding>, ScenarioError> {
    let mut bindings = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let mut cursor = Cursor {
            chars: raw_line.chars().collect(),
            pos: 0,
            line: idx as u32 + 1,
        };
        if let Some(binding) = parse_line(&mut cursor)? {
            bindings.push(binding);
        }
    }
    Ok(bindings)
}

fn parse_line(c: &mut Cursor) -> Result<Option<Binding>, ScenarioError> {
    c.skip_ws();
    match c.peek() {
        None | Some('#') => return Ok(None),
        _ => {}
    }

    let key_col = c.col();
    let segments = parse_path(c)?;
    let path = segments.join(".");

    c.skip_ws();
    if c.peek() != Some('=') {
        return Err(c.error(c.col(), format!("expected `=` after key `{path}`")));
    }
    c.bump();
    c.skip_ws();

    let value = parse_value(c)?;

    c.skip_ws();
    match c.peek() {
        None | Some('#') => {}
        Some(other) => {
            return Err(c.error(
                c.col(),
                format!("unexpected character `{other}` after value"),
            ))
        }
    }

    Ok(Some(Binding {
        path,
        segments,
        value,
        line: c.line,
        col: key_col,
    }))
}

fn is_segment_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

fn parse_path(c: &mut Cursor) -> Result<Vec<String>, ScenarioError> {
    let mut segments = Vec::new();
    loop {
        let start_col = c.col();
        let mut segment = String::new();
        while matches!(c.peek(), Some(ch) if is_segment_char(ch)) {
            segment.push(c.bump().expect("peeked"));
        }
        if segment.is_empty() {
            return Err(c.error(start_col, "expected a key segment"));
        }
        segments.push(segment);
        if c.peek() == Some('.') {
            c.bump();
        } else {
            return Ok(segments);
        }
    }
}

fn parse_value(c: &mut Cursor) -> Result<Value, ScenarioError> {
    match c.peek() {
        None => Err(c.error(c.col(), "expected a value")),
        Some('"') => parse_string(c),
        Some('[') => parse_list(c),
        Some(_) => parse_scalar_word(c),
    }
}

fn parse_string(c: &mut Cursor) -> Result<Value, ScenarioError> {
    let open_col = c.col();
    c.bump(); // opening quote
    let mut out = String::new();
    loop {
        match c.bump() {
            None => return Err(c.error(open_col, "unterminated string literal")),
            Some('"') => return Ok(Value::Str(out)),
            Some('\\') => match c.bump() {
                Some('"') => out.push('"'),
                Some('\\') => out.push('\\'),
                Some('n') => out.push('\n'),
                Some('t') => out.push('\t'),
                Some(other) => {
                    return Err(c.error(c.col() - 1, format!("unknown escape `\\{other}`")))
                }
                None => return Err(c.error(open_col, "unterminated string literal")),
            },
            Some(ch) => out.push(ch),
        }
    }
}

fn parse_list(c: &mut Cursor) -> Result<Value, ScenarioError> {
    c.bump(); // opening bracket
    let mut items = Vec::new();
    loop {
        c.skip_ws();
        match c.peek() {
            None => return Err(c.error(c.col(), "unterminated list")),
            Some(']') => {
                c.bump();
                return Ok(Value::List(items));
            }
            _ => {}
        }
        if !items.is_empty() {
            if c.peek() != Some(',') {
                return Err(c.error(c.col(), "expected `,` or `]` in list"));
            }
            c.bump();
            c.skip_ws();
        }
        if c.peek() == Some(']') {
            // A single trailing comma is tolerated.
            c.bump();
            return Ok(Value::List(items));
        }
        items.push(parse_value(c)?);
    }
}

fn parse_scalar_word(c: &mut Cursor) -> Result<Value, ScenarioError> {
    let start_col = c.col();
    let mut word = String::new();
    while matches!(c.peek(), Some(ch) if !ch.is_whitespace() && ch != '#' && ch != ',' && ch != ']')
    {
        word.push(c.bump().expect("peeked"));
    }
    match word.as_str() {
        "" => Err(c.error(start_col, "expected a value")),
        "true" => Ok(Value::Bool(true)),
        "false" => Ok(Value::Bool(false)),
        _ => parse_number(&word).ok_or_else(|| {
            c.error(
                start_col,
                format!("`{word}` is not a number, boolean, quoted string or list"),
            )
        }),
    }
}

fn parse_number(word: &str) -> Option<Value> {
    let looks_decimal = word.contains(['.', 'e', 'E']);
    if looks_decimal {
        let parsed: f64 = word.parse().ok()?;
        if !parsed.is_finite() {
            return None;
        }
        Some(Value::Dec(parsed))
    } else {
        word.parse::<i128>().ok().map(Value::Int)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(text: &str) -> Binding {
        let all = parse_document(text).unwrap();
        assert_eq!(all.len(), 1, "expected one binding in {text:?}");
        all.into_iter().next().unwrap()
    }

    #[test]
    fn parses_scalars() {
        assert_eq!(one("horizon = 200").value, Value::Int(200));
        assert_eq!(one("genesis.idea_rate = 0.5").value, Value::Dec(0.5));
        assert_eq!(one("flag = true").value, Value::Bool(true));
        assert_eq!(
            one("name = \"everlasting growth\"").value,
            Value::Str("everlasting growth".into())
        );
    }

    #[test]
    fn parses_lists_and_comments() {
        let b = one("sweep.thetas = [0, 10, 20] # swept values");
        assert_eq!(
            b.value,
            Value::List(vec![Value::Int(0), Value::Int(10), Value::Int(20)])
        );
        assert!(parse_document("# only a comment\n\n   \n").unwrap().is_empty());
    }

    #[test]
    fn records_key_position() {
        let b = one("  region.0.name = \"alpha\"");
        assert_eq!((b.line, b.col), (1, 3));
        assert_eq!(b.segments, vec!["region", "0", "name"]);
    }

    #[test]
    fn missing_equals_has_exact_position() {
        let err = parse_document("seed 42").unwrap_err();
        assert_eq!(
            err,
            ScenarioError::Syntax {
                line: 1,
                col: 6,
                message: "expected `=` after key `seed`".into()
            }
        );
    }

    #[test]
    fn bad_value_has_exact_position() {
        let err = parse_document("a = 1\nb = oops").unwrap_err();
        match err {
            ScenarioError::Syntax { line, col, .. } => {
                assert_eq!((line, col), (2, 5));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unterminated_string_points_at_the_quote() {
        let err = parse_document("name = \"oops").unwrap_err();
        match err {
            ScenarioError::Syntax { line, col, message } => {
                assert_eq!((line, col), (1, 8));
                assert!(message.contains("unterminated"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn trailing_garbage_is_rejected() {
        let err = parse_document("seed = 42 xyz").unwrap_err();
        match err {
            ScenarioError::Syntax { col, .. } => assert_eq!(col, 11),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn scientific_notation_is_a_decimal() {
        assert_eq!(one("floor = 1e-3").value, Value::Dec(1e-3));
    }
}

//! Minimal DOT grammar checker: graph header, node, edge, attribute and `ID = ID` statements.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("DOT syntax error at byte {offset}: {message}")]
pub struct DotSyntaxError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Id(String),
    Punct(&'static str),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, DotSyntaxError> {
    let err = |offset, message: &str| DotSyntaxError {
        offset,
        message: message.to_string(),
    };
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'{' | b'}' | b'[' | b']' | b';' | b',' | b'=' => {
                let p = match c {
                    b'{' => "{",
                    b'}' => "}",
                    b'[' => "[",
                    b']' => "]",
                    b';' => ";",
                    b',' => ",",
                    _ => "=",
                };
                tokens.push((i, Token::Punct(p)));
                i += 1;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                tokens.push((i, Token::Punct("->")));
                i += 2;
            }
            b'-' if bytes.get(i + 1) == Some(&b'-') => {
                tokens.push((i, Token::Punct("--")));
                i += 2;
            }
            b'"' => {
                let start = i;
                i += 1;
                let mut value = String::new();
                loop {
                    let Some(&b) = bytes.get(i) else {
                        return Err(err(start, "unterminated string"));
                    };
                    match b {
                        b'"' => break,
                        b'\\' if i + 1 < bytes.len() => {
                            value.push('\\');
                            i += 1;
                            value.push(text[i..].chars().next().expect("in bounds"));
                            i += text[i..].chars().next().map_or(1, char::len_utf8);
                            continue;
                        }
                        _ => {}
                    }
                    let ch = text[i..].chars().next().expect("in bounds");
                    value.push(ch);
                    i += ch.len_utf8();
                }
                i += 1;
                tokens.push((start, Token::Id(value)));
            }
            _ if c.is_ascii_alphanumeric() || c == b'_' || c == b'.' || c == b'-' || c >= 0x80 => {
                let start = i;
                let numeral = c.is_ascii_digit() || c == b'.' || c == b'-';
                while i < bytes.len() {
                    let b = bytes[i];
                    let ok = if numeral {
                        b.is_ascii_digit() || b == b'.' || (i == start && b == b'-')
                    } else {
                        b.is_ascii_alphanumeric() || b == b'_' || b >= 0x80
                    };
                    if !ok {
                        break;
                    }
                    i += 1;
                }
                tokens.push((start, Token::Id(text[start..i].to_string())));
            }
            _ => return Err(err(i, "unexpected character")),
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn fail<T>(&self, message: &str) -> Result<T, DotSyntaxError> {
        Err(DotSyntaxError {
            offset: self.offset(),
            message: message.to_string(),
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.1)
    }

    fn eat(&mut self, p: &str) -> bool {
        if matches!(self.peek(), Some(Token::Punct(q)) if *q == p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<(), DotSyntaxError> {
        if self.eat(p) {
            Ok(())
        } else {
            self.fail(&format!("expected `{p}`"))
        }
    }

    fn id(&mut self) -> Result<String, DotSyntaxError> {
        match self.peek() {
            Some(Token::Id(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail("expected identifier"),
        }
    }

    fn attr_list(&mut self) -> Result<(), DotSyntaxError> {
        while self.eat("[") {
            while !self.eat("]") {
                self.id()?;
                self.expect("=")?;
                self.id()?;
                if !self.eat(",") {
                    self.eat(";");
                }
            }
        }
        Ok(())
    }

    fn graph(&mut self) -> Result<(), DotSyntaxError> {
        let mut head = self.id()?;
        if head == "strict" {
            head = self.id()?;
        }
        let edge_op = match head.as_str() {
            "digraph" => "->",
            "graph" => "--",
            _ => return self.fail("expected `graph` or `digraph`"),
        };
        if matches!(self.peek(), Some(Token::Id(_))) {
            self.id()?;
        }
        self.expect("{")?;
        loop {
            if self.eat("}") {
                break;
            }
            if self.peek().is_none() {
                return self.fail("unterminated graph body");
            }
            let first = self.id()?;
            if matches!(first.as_str(), "graph" | "node" | "edge") && matches!(self.peek(), Some(Token::Punct("["))) {
                self.attr_list()?;
            } else if self.eat("=") {
                self.id()?;
            } else {
                let other = if edge_op == "->" { "--" } else { "->" };
                if self.eat(other) {
                    return self.fail(&format!("`{other}` used in a {head}"));
                }
                while self.eat(edge_op) {
                    self.id()?;
                }
                self.attr_list()?;
            }
            self.eat(";");
        }
        if self.pos != self.tokens.len() {
            return self.fail("trailing input after graph");
        }
        Ok(())
    }
}

/// Checks that `text` is a single well-formed DOT graph.
pub fn check_dot(text: &str) -> Result<(), DotSyntaxError> {
    let tokens = tokenize(text)?;
    Parser {
        tokens,
        pos: 0,
        end: text.len(),
    }
    .graph()
}

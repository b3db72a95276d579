//! Recursive-descent parser for layered source units.
//!
//! ```text
//! unit        := { layer_decl | class_decl } ;
//! layer_decl  := "layer" qualified_name ";" ;
//! class_decl  := marker? "class" IDENT "{" { method_decl } "}" ;
//! marker      := "@LayeredClass" "(" mapping { "," mapping } ")" ;
//! mapping     := IDENT "=>" qualified_name ;
//! method_decl := "method" IDENT "(" [param {"," param}] ")" "->" type_name "{" body_tokens "}" ;
//! param       := IDENT ":" type_name ;
//! ```

use super::diag::{Code, Diagnostic};
use super::lexer::{lex, Spanned, Token, TokenKind};
use super::manifest::{MethodDecl, Param};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerDecl {
    pub qualified_name: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingDecl {
    pub local_name: String,
    pub qualified_name: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodAst {
    pub decl: MethodDecl,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: String,
    pub line: usize,
    /// `None` for classes without the `@LayeredClass` marker.
    pub mappings: Option<Vec<MappingDecl>>,
    pub methods: Vec<MethodAst>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Unit {
    pub layers: Vec<LayerDecl>,
    pub classes: Vec<ClassDecl>,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos).map(|s| &s.token)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map_or(1, |s| s.line)
    }

    fn error(&self, expected: &str) -> Diagnostic {
        let found = match self.peek() {
            Some(t) => format!("`{t}`"),
            None => "end of input".to_owned(),
        };
        Diagnostic::new(
            self.line(),
            Code::SyntaxError,
            format!("expected {expected}, found {found}"),
        )
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].token.clone();
        self.pos += 1;
        t
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.peek().is_some_and(|t| t.is_punct(p)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(&format!("`{p}`")))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.peek().is_some_and(|t| t.is_ident(kw)) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("`{kw}`")))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(t) if t.kind() == TokenKind::Ident => Ok(self.bump().text().to_owned()),
            _ => Err(self.error(what)),
        }
    }

    fn qualified_name(&mut self, what: &str) -> PResult<String> {
        let mut name = self.ident(what)?;
        while self.eat_punct(".") {
            name.push('.');
            name.push_str(&self.ident("identifier after `.`")?);
        }
        Ok(name)
    }

    fn unit(&mut self) -> PResult<Unit> {
        let mut unit = Unit::default();
        while let Some(t) = self.peek() {
            if t.is_ident("layer") {
                let line = self.line();
                self.pos += 1;
                let qualified_name = self.qualified_name("layer name")?;
                self.expect_punct(";")?;
                unit.layers.push(LayerDecl { qualified_name, line });
            } else if t.is_punct("@") || t.is_ident("class") {
                unit.classes.push(self.class()?);
            } else {
                return Err(self.error("`layer`, `class` or `@LayeredClass`"));
            }
        }
        Ok(unit)
    }

    fn class(&mut self) -> PResult<ClassDecl> {
        let line = self.line();
        let mappings = if self.eat_punct("@") {
            self.expect_keyword("LayeredClass")?;
            self.expect_punct("(")?;
            let mut mappings = vec![self.mapping()?];
            while self.eat_punct(",") {
                mappings.push(self.mapping()?);
            }
            self.expect_punct(")")?;
            Some(mappings)
        } else {
            None
        };
        self.expect_keyword("class")?;
        let name = self.ident("class name")?;
        self.expect_punct("{")?;
        let mut methods = Vec::new();
        while !self.eat_punct("}") {
            if self.peek().is_none() {
                return Err(self.error("`}` closing the class"));
            }
            methods.push(self.method()?);
        }
        Ok(ClassDecl {
            name,
            line,
            mappings,
            methods,
        })
    }

    fn mapping(&mut self) -> PResult<MappingDecl> {
        let line = self.line();
        let local_name = self.ident("layer local name")?;
        self.expect_punct("=>")?;
        let qualified_name = self.qualified_name("qualified layer name")?;
        Ok(MappingDecl {
            local_name,
            qualified_name,
            line,
        })
    }

    fn method(&mut self) -> PResult<MethodAst> {
        let line = self.line();
        self.expect_keyword("method")?;
        let name = self.ident("method name")?;
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if !self.eat_punct(")") {
            loop {
                let pname = self.ident("parameter name")?;
                self.expect_punct(":")?;
                let type_name = self.qualified_name("parameter type")?;
                params.push(Param { name: pname, type_name });
                if self.eat_punct(")") {
                    break;
                }
                self.expect_punct(",")?;
            }
        }
        self.expect_punct("->")?;
        let return_type = self.qualified_name("return type")?;
        self.expect_punct("{")?;
        let mut depth = 1usize;
        let mut body = Vec::new();
        loop {
            let Some(t) = self.peek() else {
                return Err(self.error("`}` closing the method body"));
            };
            if t.is_punct("{") {
                depth += 1;
            } else if t.is_punct("}") {
                depth -= 1;
                if depth == 0 {
                    self.pos += 1;
                    break;
                }
            }
            body.push(self.bump());
        }
        Ok(MethodAst {
            decl: MethodDecl {
                name,
                params,
                return_type,
                body,
            },
            line,
        })
    }
}

pub fn parse(src: &str) -> Result<Unit, Diagnostic> {
    let toks = lex(src)?;
    Parser { toks, pos: 0 }.unit()
}

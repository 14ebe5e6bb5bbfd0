//! Text descriptions of groups.
//!
//! Grammar (whitespace is free, indices are 1-based):
//!
//! ```text
//! group    := ab | cyc | sd | wr | tw | ext
//! ab       := "ab" "(" int { "," int } ")"          abelian, one exponent per factor
//! cyc      := "cyc" "(" int ")"                      shorthand for ab(q)
//! sd       := "sd" "(" group "," group "," mats ")"  K ⋊ P, one matrix per coordinate
//!                                                    generator of the abelian point group
//! mats     := "[" mat { ";" mat } "]"
//! mat      := "[" row { ";" row } "]"
//! row      := int { "," int }
//! wr       := "wr" "(" group "," int "," perms ")"   G ≀ S, S generated by the permutations
//! perms    := "[" perm { ";" perm } "]"
//! perm     := "(" int { "," int } ")"                images of 1..n
//! tw       := "tw" "(" group "," form ")"            twisted abelian group A_lambda
//! form     := "{" [ pair { "," pair } ] "}"
//! pair     := "(" int "," int ")" ":" "(" int { "," int } ")"   lambda(e_i, e_j) by coordinates
//! ext      := "ext" "(" group "," group "," act "," coc ")"    extension of Q by abelian Z
//! act      := "trivial" | mats
//! coc      := "zero" | "carry" | "[" int { "," int } "]"       |Q|^2 table of Z elements
//! ```
//!
//! Examples: `ab(9,9)`, `sd(ab(9,9), cyc(3), [[0,-1;1,-1]])`,
//! `tw(ab(9,9), {(1,2):(3,0)})`, `wr(cyc(3), 3, [(2,3,1)])`,
//! `ext(cyc(3), cyc(3), trivial, carry)`.

use super::extensions::carry_cocycle;
use super::{
    build_abelian, build_extension, build_semidirect, build_twisted, build_wreath, ActionHom,
    AlternatingForm, Group, Permutation,
};

/// A parse or construction error with source location.
#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
#[error("{message} at line {line}, column {col}")]
pub struct DslError {
    pub message: String,
    pub line: usize,
    pub col: usize,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Punct(char),
    Eof,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn err(&self, message: impl Into<String>) -> DslError {
        DslError { message: message.into(), line: self.line, col: self.col }
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    fn skip_ws(&mut self) {
        while let Some(&b) = self.src.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn next(&mut self) -> Result<Tok, DslError> {
        self.skip_ws();
        let Some(&b) = self.src.get(self.pos) else { return Ok(Tok::Eof) };
        if b.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(&c) = self.src.get(self.pos) {
                if c.is_ascii_alphanumeric() || c == b'_' {
                    s.push(c as char);
                    self.bump();
                } else {
                    break;
                }
            }
            return Ok(Tok::Ident(s));
        }
        if b.is_ascii_digit() || b == b'-' {
            let neg = b == b'-';
            if neg {
                self.bump();
                if !self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                    return Err(self.err("expected digits after '-'"));
                }
            }
            let mut v: i64 = 0;
            while let Some(&c) = self.src.get(self.pos) {
                if c.is_ascii_digit() {
                    v = v * 10 + (c - b'0') as i64;
                    self.bump();
                } else {
                    break;
                }
            }
            return Ok(Tok::Int(if neg { -v } else { v }));
        }
        if "(),[];:{}".contains(b as char) {
            self.bump();
            return Ok(Tok::Punct(b as char));
        }
        Err(self.err(format!("unexpected character '{}'", b as char)))
    }

    fn peek(&mut self) -> Result<Tok, DslError> {
        let save = (self.pos, self.line, self.col);
        let t = self.next();
        (self.pos, self.line, self.col) = save;
        t
    }

    fn expect(&mut self, p: char) -> Result<(), DslError> {
        match self.next()? {
            Tok::Punct(c) if c == p => Ok(()),
            other => Err(self.err(format!("expected '{p}', found {other:?}"))),
        }
    }

    fn int(&mut self) -> Result<i64, DslError> {
        match self.next()? {
            Tok::Int(v) => Ok(v),
            other => Err(self.err(format!("expected an integer, found {other:?}"))),
        }
    }

    fn uint(&mut self) -> Result<u64, DslError> {
        let v = self.int()?;
        if v < 0 {
            return Err(self.err("expected a nonnegative integer"));
        }
        Ok(v as u64)
    }
}

fn smallest_prime_factor(n: u64) -> u32 {
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return d as u32;
        }
        d += 1;
    }
    n as u32
}

/// Parses a group description.
pub fn parse_group(src: &str) -> Result<Group, DslError> {
    let mut lx = Lexer::new(src);
    let g = parse_expr(&mut lx)?;
    match lx.next()? {
        Tok::Eof => Ok(g),
        other => Err(lx.err(format!("trailing input: {other:?}"))),
    }
}

fn parse_expr(lx: &mut Lexer) -> Result<Group, DslError> {
    let name = match lx.next()? {
        Tok::Ident(s) => s,
        other => Err(lx.err(format!("expected a constructor name, found {other:?}")))?,
    };
    match name.as_str() {
        "ab" | "cyc" => {
            lx.expect('(')?;
            let mut exps = vec![lx.uint()?];
            loop {
                match lx.next()? {
                    Tok::Punct(',') => exps.push(lx.uint()?),
                    Tok::Punct(')') => break,
                    other => return Err(lx.err(format!("expected ',' or ')', found {other:?}"))),
                }
            }
            if name == "cyc" && exps.len() != 1 {
                return Err(lx.err("cyc takes exactly one exponent"));
            }
            let p = smallest_prime_factor(exps[0]);
            build_abelian(p, &exps).map_err(|e| lx.err(e.to_string()))
        }
        "sd" => {
            lx.expect('(')?;
            let k = parse_expr(lx)?;
            lx.expect(',')?;
            let p = parse_expr(lx)?;
            lx.expect(',')?;
            let mats = parse_matrix_list(lx)?;
            lx.expect(')')?;
            let act = ActionHom::from_matrices(&p, &k, &mats).map_err(|e| lx.err(e.to_string()))?;
            build_semidirect(&k, &p, &act).map_err(|e| lx.err(e.to_string()))
        }
        "wr" => {
            lx.expect('(')?;
            let g = parse_expr(lx)?;
            lx.expect(',')?;
            let n = lx.uint()? as usize;
            lx.expect(',')?;
            let perms = parse_perm_list(lx, n)?;
            lx.expect(')')?;
            build_wreath(&g, n, &perms).map_err(|e| lx.err(e.to_string()))
        }
        "tw" => {
            lx.expect('(')?;
            let a = parse_expr(lx)?;
            lx.expect(',')?;
            let pairs = parse_form(lx, &a)?;
            lx.expect(')')?;
            let form = AlternatingForm::new(&a, &pairs).map_err(|e| lx.err(e.to_string()))?;
            build_twisted(&a, &form).map_err(|e| lx.err(e.to_string()))
        }
        "ext" => {
            lx.expect('(')?;
            let q = parse_expr(lx)?;
            lx.expect(',')?;
            let z = parse_expr(lx)?;
            lx.expect(',')?;
            let act = match lx.peek()? {
                Tok::Ident(s) if s == "trivial" => {
                    lx.next()?;
                    ActionHom::trivial(&q, &z)
                }
                _ => {
                    let mats = parse_matrix_list(lx)?;
                    ActionHom::from_matrices(&q, &z, &mats).map_err(|e| lx.err(e.to_string()))?
                }
            };
            lx.expect(',')?;
            let coc = match lx.peek()? {
                Tok::Ident(s) if s == "zero" => {
                    lx.next()?;
                    vec![0u32; q.order() * q.order()]
                }
                Tok::Ident(s) if s == "carry" => {
                    lx.next()?;
                    if q.order() != z.order() {
                        return Err(lx.err("carry needs |Q| = |Z| cyclic of the same order"));
                    }
                    carry_cocycle(q.order() as u32)
                }
                _ => {
                    lx.expect('[')?;
                    let mut vals = vec![lx.uint()? as u32];
                    loop {
                        match lx.next()? {
                            Tok::Punct(',') => vals.push(lx.uint()? as u32),
                            Tok::Punct(']') => break,
                            other => {
                                return Err(lx.err(format!("expected ',' or ']', found {other:?}")))
                            }
                        }
                    }
                    vals
                }
            };
            lx.expect(')')?;
            build_extension(&q, &z, &act, coc).map_err(|e| lx.err(e.to_string()))
        }
        other => Err(lx.err(format!("unknown constructor '{other}'"))),
    }
}

fn parse_matrix_list(lx: &mut Lexer) -> Result<Vec<Vec<Vec<i64>>>, DslError> {
    lx.expect('[')?;
    let mut mats = vec![parse_matrix(lx)?];
    loop {
        match lx.next()? {
            Tok::Punct(';') => mats.push(parse_matrix(lx)?),
            Tok::Punct(']') => break,
            other => return Err(lx.err(format!("expected ';' or ']', found {other:?}"))),
        }
    }
    Ok(mats)
}

fn parse_matrix(lx: &mut Lexer) -> Result<Vec<Vec<i64>>, DslError> {
    lx.expect('[')?;
    let mut rows = vec![vec![lx.int()?]];
    loop {
        match lx.next()? {
            Tok::Punct(',') => rows.last_mut().unwrap().push(lx.int()?),
            Tok::Punct(';') => rows.push(vec![lx.int()?]),
            Tok::Punct(']') => break,
            other => return Err(lx.err(format!("expected ',', ';' or ']', found {other:?}"))),
        }
    }
    Ok(rows)
}

fn parse_perm_list(lx: &mut Lexer, n: usize) -> Result<Vec<Permutation>, DslError> {
    lx.expect('[')?;
    let mut perms = vec![parse_perm(lx, n)?];
    loop {
        match lx.next()? {
            Tok::Punct(';') => perms.push(parse_perm(lx, n)?),
            Tok::Punct(']') => break,
            other => return Err(lx.err(format!("expected ';' or ']', found {other:?}"))),
        }
    }
    Ok(perms)
}

fn parse_perm(lx: &mut Lexer, n: usize) -> Result<Permutation, DslError> {
    lx.expect('(')?;
    let mut images = vec![lx.uint()?];
    loop {
        match lx.next()? {
            Tok::Punct(',') => images.push(lx.uint()?),
            Tok::Punct(')') => break,
            other => return Err(lx.err(format!("expected ',' or ')', found {other:?}"))),
        }
    }
    if images.len() != n || images.iter().any(|&i| i == 0 || i as usize > n) {
        return Err(lx.err(format!("permutation must list the images of 1..{n}")));
    }
    Ok(Permutation(images.into_iter().map(|i| (i - 1) as u32).collect()))
}

fn parse_form(lx: &mut Lexer, a: &Group) -> Result<Vec<(usize, usize, u64)>, DslError> {
    let enc = super::abelian::encoding_of(a)
        .ok_or_else(|| lx.err("tw needs an abelian base group"))?;
    lx.expect('{')?;
    let mut pairs = Vec::new();
    if lx.peek()? == Tok::Punct('}') {
        lx.next()?;
        return Ok(pairs);
    }
    loop {
        lx.expect('(')?;
        let i = lx.uint()? as usize;
        lx.expect(',')?;
        let j = lx.uint()? as usize;
        lx.expect(')')?;
        lx.expect(':')?;
        lx.expect('(')?;
        let mut coords = vec![lx.uint()?];
        loop {
            match lx.next()? {
                Tok::Punct(',') => coords.push(lx.uint()?),
                Tok::Punct(')') => break,
                other => return Err(lx.err(format!("expected ',' or ')', found {other:?}"))),
            }
        }
        if i == 0 || j == 0 || i > enc.rank() || j > enc.rank() || coords.len() != enc.rank() {
            return Err(lx.err("form indices are 1-based and values list one coordinate per factor"));
        }
        pairs.push((i - 1, j - 1, enc.encode(&coords)));
        match lx.next()? {
            Tok::Punct(',') => continue,
            Tok::Punct('}') => break,
            other => return Err(lx.err(format!("expected ',' or '}}', found {other:?}"))),
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_basic_groups() {
        assert_eq!(parse_group("ab(9,9)").unwrap().order(), 81);
        assert_eq!(parse_group("cyc(3)").unwrap().order(), 3);
        assert_eq!(parse_group(" ab( 3 , 9 ) ").unwrap().order(), 27);
    }

    #[test]
    fn parse_semidirect_and_wreath() {
        let g = parse_group("sd(ab(9,9), cyc(3), [[0,-1;1,-1]])").unwrap();
        assert_eq!(g.order(), 243);
        assert!(!g.is_abelian());
        let w = parse_group("wr(cyc(3), 3, [(2,3,1)])").unwrap();
        assert_eq!(w.order(), 81);
    }

    #[test]
    fn parse_twist_and_extension() {
        let t = parse_group("tw(ab(9,9), {(1,2):(3,0)})").unwrap();
        assert_eq!(t.order(), 81);
        assert!(!t.is_abelian());
        let e = parse_group("ext(cyc(3), cyc(3), trivial, carry)").unwrap();
        assert_eq!(e.order(), 9);
        assert_eq!(e.exponent(), 9);
    }

    #[test]
    fn errors_carry_location() {
        let err = parse_group("ab(9,\n  x)").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.col >= 3);
        let err = parse_group("sd(ab(3),cyc(3)").unwrap_err();
        assert_eq!(err.line, 1);
    }
}

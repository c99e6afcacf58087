//! Samples strings that satisfy the simple regular expressions used by the
//! fixture specifications (literals, classes, groups, alternation and
//! quantifiers). Unsupported constructs return None and the caller falls
//! back to an unconstrained segment.

use rand::prelude::*;

pub fn sample(pattern: &str, rng: &mut StdRng) -> Option<String> {
    let mut p = pattern;
    if let Some(rest) = p.strip_prefix('^') {
        p = rest;
    }
    if let Some(rest) = p.strip_suffix('$') {
        p = rest;
    }
    let chars: Vec<char> = p.chars().collect();
    let mut pos = 0usize;
    let node = parse_alternation(&chars, &mut pos)?;
    if pos != chars.len() {
        return None;
    }
    let mut out = String::new();
    render(&node, rng, &mut out);
    Some(out)
}

enum Node {
    Literal(char),
    /// Concrete characters the class denotes.
    Class(Vec<char>),
    Sequence(Vec<Node>),
    Alternation(Vec<Node>),
    Repeat(Box<Node>, usize, usize),
}

fn parse_alternation(chars: &[char], pos: &mut usize) -> Option<Node> {
    let mut branches = vec![parse_sequence(chars, pos)?];
    while *pos < chars.len() && chars[*pos] == '|' {
        *pos += 1;
        branches.push(parse_sequence(chars, pos)?);
    }
    if branches.len() == 1 {
        branches.pop()
    } else {
        Some(Node::Alternation(branches))
    }
}

fn parse_sequence(chars: &[char], pos: &mut usize) -> Option<Node> {
    let mut items = Vec::new();
    while *pos < chars.len() && chars[*pos] != '|' && chars[*pos] != ')' {
        let atom = parse_atom(chars, pos)?;
        items.push(parse_quantifier(chars, pos, atom)?);
    }
    Some(Node::Sequence(items))
}

fn parse_atom(chars: &[char], pos: &mut usize) -> Option<Node> {
    match chars.get(*pos)? {
        '(' => {
            *pos += 1;
            if chars.get(*pos) == Some(&'?') {
                // Only the non-capturing marker is supported.
                if chars.get(*pos + 1) == Some(&':') {
                    *pos += 2;
                } else {
                    return None;
                }
            }
            let inner = parse_alternation(chars, pos)?;
            if chars.get(*pos) != Some(&')') {
                return None;
            }
            *pos += 1;
            Some(inner)
        }
        '[' => {
            *pos += 1;
            let negated = chars.get(*pos) == Some(&'^');
            if negated {
                *pos += 1;
            }
            let mut members = Vec::new();
            while chars.get(*pos).is_some() && chars[*pos] != ']' {
                let c = if chars[*pos] == '\\' {
                    *pos += 1;
                    *chars.get(*pos)?
                } else {
                    chars[*pos]
                };
                *pos += 1;
                if chars.get(*pos) == Some(&'-') && chars.get(*pos + 1).is_some_and(|c| *c != ']')
                {
                    *pos += 1;
                    let end = chars[*pos];
                    *pos += 1;
                    for v in (c as u32)..=(end as u32) {
                        members.push(char::from_u32(v)?);
                    }
                } else {
                    members.push(c);
                }
            }
            if chars.get(*pos) != Some(&']') {
                return None;
            }
            *pos += 1;
            if negated {
                let complement: Vec<char> = ('0'..='9')
                    .chain('a'..='z')
                    .chain('A'..='Z')
                    .filter(|c| !members.contains(c))
                    .collect();
                if complement.is_empty() {
                    return None;
                }
                Some(Node::Class(complement))
            } else if members.is_empty() {
                None
            } else {
                Some(Node::Class(members))
            }
        }
        '\\' => {
            *pos += 1;
            let c = *chars.get(*pos)?;
            *pos += 1;
            match c {
                'd' => Some(Node::Class(('0'..='9').collect())),
                'w' => Some(Node::Class(
                    ('0'..='9').chain('a'..='z').chain('A'..='Z').chain(['_']).collect(),
                )),
                '.' | '-' | '\\' | '/' | '+' | '(' | ')' | '[' | ']' | '{' | '}' | '^' | '$'
                | '|' | '?' | '*' => Some(Node::Literal(c)),
                _ => None,
            }
        }
        '.' => {
            *pos += 1;
            // Anything printable works; stay on safe path characters.
            Some(Node::Class(('0'..='9').chain('a'..='z').chain('A'..='Z').collect()))
        }
        c => {
            let c = *c;
            *pos += 1;
            Some(Node::Literal(c))
        }
    }
}

fn parse_quantifier(chars: &[char], pos: &mut usize, atom: Node) -> Option<Node> {
    match chars.get(*pos) {
        Some('*') => {
            *pos += 1;
            Some(Node::Repeat(Box::new(atom), 0, 3))
        }
        Some('+') => {
            *pos += 1;
            Some(Node::Repeat(Box::new(atom), 1, 4))
        }
        Some('?') => {
            *pos += 1;
            Some(Node::Repeat(Box::new(atom), 0, 1))
        }
        Some('{') => {
            *pos += 1;
            let mut min_text = String::new();
            while chars.get(*pos).is_some_and(char::is_ascii_digit) {
                min_text.push(chars[*pos]);
                *pos += 1;
            }
            let min: usize = min_text.parse().ok()?;
            let max = match chars.get(*pos) {
                Some(',') => {
                    *pos += 1;
                    let mut max_text = String::new();
                    while chars.get(*pos).is_some_and(char::is_ascii_digit) {
                        max_text.push(chars[*pos]);
                        *pos += 1;
                    }
                    if max_text.is_empty() {
                        min + 3
                    } else {
                        // Long spans stay short for test speed but always valid.
                        max_text.parse::<usize>().ok()?.min(min + 4)
                    }
                }
                _ => min,
            };
            if chars.get(*pos) != Some(&'}') {
                return None;
            }
            *pos += 1;
            Some(Node::Repeat(Box::new(atom), min, max))
        }
        _ => Some(atom),
    }
}

fn render(node: &Node, rng: &mut StdRng, out: &mut String) {
    match node {
        Node::Literal(c) => out.push(*c),
        Node::Class(members) => {
            out.push(members[rng.random_range(0..members.len())]);
        }
        Node::Sequence(items) => {
            for item in items {
                render(item, rng, out);
            }
        }
        Node::Alternation(branches) => {
            let pick = rng.random_range(0..branches.len());
            render(&branches[pick], rng, out);
        }
        Node::Repeat(inner, min, max) => {
            let n = rng.random_range(*min..=*max.max(min));
            for _ in 0..n {
                render(inner, rng, out);
            }
        }
    }
}

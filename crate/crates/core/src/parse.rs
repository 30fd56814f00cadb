//! Text forms for loops, loop sequences and trajectories.
//!
//! A loop is a whitespace separated list of steps (`x+ y+ x- y-`, or `a3-`
//! for axis 3) with an optional basepoint `@(0,0)`, the word `null`, or one
//! of the macros `rect W H`, `wrap K`, `commutator K`, `tree [(g,k,s),...]`.
//! Sequences separate loops with `;`.

use crate::error::{Error, Result};
use crate::lattice::{
    commutator_walk, embed, erase_backtracks, rectangle_walk, wrapped_plaquette_walk, ClosedWalk, DecoratedTree, Loop,
    LoopSequence, Plaquette, Site, Step, MAX_DIM,
};
use crate::solver::{Move, MoveKind};

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { pos, msg: msg.into() })
}

/// Whitespace separated tokens with their byte offsets.
fn tokens(s: &str, base: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(st)) => {
                out.push((base + st, &s[st..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(st) = start {
        out.push((base + st, &s[st..]));
    }
    out
}

pub fn parse_step(tok: &str, dim: usize, pos: usize) -> Result<Step> {
    let (name, sign) = match tok.char_indices().last() {
        Some((i, '+')) => (&tok[..i], true),
        Some((i, '-')) => (&tok[..i], false),
        _ => return err(pos, format!("step {tok:?} must end in + or -")),
    };
    let axis = match name {
        "x" => 0,
        "y" => 1,
        "z" => 2,
        "w" => 3,
        _ => match name.strip_prefix('a').and_then(|n| n.parse::<usize>().ok()) {
            Some(n) if n >= 1 => n - 1,
            _ => return err(pos, format!("unknown axis {name:?}")),
        },
    };
    if axis >= dim {
        return err(pos, format!("axis {name} outside dimension {dim}"));
    }
    Ok(Step::new(axis, sign))
}

/// `(c1,...,cd)` with integer entries.
pub fn parse_site(s: &str, pos: usize) -> Result<Site> {
    let inner = s
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::Parse { pos, msg: format!("expected (c1,...,cd), got {s:?}") })?;
    let mut coords = Vec::new();
    for part in inner.split(',') {
        match part.trim().parse::<i32>() {
            Ok(c) => coords.push(c),
            Err(_) => return err(pos, format!("bad coordinate {part:?}")),
        }
    }
    if coords.is_empty() || coords.len() > MAX_DIM {
        return err(pos, "coordinate count out of range");
    }
    Ok(Site::new(&coords))
}

fn parse_count(toks: &[(usize, &str)], i: usize, what: &str, end: usize) -> Result<usize> {
    match toks.get(i) {
        Some(&(p, t)) => t.parse::<usize>().map_err(|_| Error::Parse { pos: p, msg: format!("{what} must be a nonnegative integer") }),
        None => err(end, format!("missing {what}")),
    }
}

/// `[(g,k,s),...]`, one triple per level from the bottom.
pub fn parse_tree(s: &str, pos: usize) -> Result<DecoratedTree> {
    let body = s.trim();
    let inner = body
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse { pos, msg: "tree expects [(g,k,s),...]".into() })?;
    let mut levels = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let open = rest.find('(').ok_or_else(|| Error::Parse { pos, msg: "expected (".into() })?;
        let close = rest.find(')').ok_or_else(|| Error::Parse { pos, msg: "unclosed (".into() })?;
        if close < open {
            return err(pos, "unbalanced parentheses");
        }
        let parts: Vec<&str> = rest[open + 1..close].split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return err(pos, "each tree level is (g,k,s)");
        }
        let num = |t: &str| t.parse::<u32>().map_err(|_| Error::Parse { pos, msg: format!("bad tree entry {t:?}") });
        let sign = match parts[2] {
            "1" | "+1" | "+" => 1,
            "-1" | "-" => -1,
            t => return err(pos, format!("orientation must be +1 or -1, got {t:?}")),
        };
        levels.push((num(parts[0])?, num(parts[1])?, sign));
        rest = rest[close + 1..].trim_start().trim_start_matches(',').trim_start();
    }
    DecoratedTree::new(levels).map_err(|e| Error::Parse { pos, msg: e.to_string() })
}

/// Parse one loop as a walk, keeping any backtracks as written.
pub fn parse_walk_at(s: &str, dim: usize, base: usize) -> Result<ClosedWalk> {
    if !(1..=MAX_DIM).contains(&dim) {
        return err(base, format!("dimension must lie in 1..={MAX_DIM}"));
    }
    let toks = tokens(s, base);
    let end = base + s.len();
    let Some(&(p0, first)) = toks.first() else {
        return err(base, "empty loop");
    };
    let planar = |w: ClosedWalk, p: usize| -> Result<ClosedWalk> {
        if dim < 2 {
            return err(p, "macros need dimension at least 2");
        }
        embed(&w, dim)
    };
    let exact = |n: usize| -> Result<()> {
        match toks.get(n) {
            Some(&(p, t)) => err(p, format!("unexpected token {t:?}")),
            None => Ok(()),
        }
    };
    match first {
        "null" => {
            exact(1)?;
            return Ok(ClosedWalk::new(Site::origin(dim), Vec::new())?);
        }
        "rect" => {
            let w = parse_count(&toks, 1, "width", end)?;
            let h = parse_count(&toks, 2, "height", end)?;
            exact(3)?;
            if w == 0 || h == 0 {
                return err(p0, "rectangle sides must be positive");
            }
            return planar(rectangle_walk(w, h), p0);
        }
        "wrap" => {
            let k = parse_count(&toks, 1, "wrap count", end)?;
            exact(2)?;
            return planar(wrapped_plaquette_walk(k), p0);
        }
        "commutator" => {
            let k = parse_count(&toks, 1, "power", end)?;
            exact(2)?;
            return planar(commutator_walk(k), p0);
        }
        "tree" => {
            let offset = s.find("tree").unwrap_or(0) + 4;
            let t = parse_tree(&s[offset..], base + offset)?;
            return planar(t.walk(), p0);
        }
        _ => {}
    }
    let mut rest = &toks[..];
    let mut basepoint = Site::origin(dim);
    if let Some(site) = first.strip_prefix('@') {
        basepoint = parse_site(site, p0 + 1)?;
        if basepoint.dim() != dim {
            return err(p0, format!("basepoint has {} coordinates, dimension is {dim}", basepoint.dim()));
        }
        rest = &toks[1..];
    }
    let steps = rest.iter().map(|&(p, t)| parse_step(t, dim, p)).collect::<Result<Vec<_>>>()?;
    ClosedWalk::new(basepoint, steps).map_err(|e| match e {
        Error::NotClosed => Error::Parse { pos: end, msg: "walk does not return to its basepoint".into() },
        other => other,
    })
}

pub fn parse_walk(s: &str, dim: usize) -> Result<ClosedWalk> {
    parse_walk_at(s, dim, 0)
}

pub fn parse_loop(s: &str, dim: usize) -> Result<Loop> {
    Ok(erase_backtracks(&parse_walk(s, dim)?))
}

/// Loops separated by `;`, null loops dropped.
pub fn parse_walks(s: &str, dim: usize) -> Result<Vec<ClosedWalk>> {
    let mut out = Vec::new();
    let mut base = 0;
    for part in s.split(';') {
        out.push(parse_walk_at(part, dim, base)?);
        base += part.len() + 1;
    }
    Ok(out)
}

pub fn parse_sequence(s: &str, dim: usize) -> Result<LoopSequence> {
    Ok(LoopSequence::new(parse_walks(s, dim)?.iter().map(erase_backtracks)))
}

/// `(i,j)@(c1,...,cd)` with an optional trailing `+` or `-` (default `+`).
/// Axes are 0-based.
pub fn parse_plaquette(s: &str, pos: usize) -> Result<Plaquette> {
    let (axes, corner) = s.split_once('@').ok_or_else(|| Error::Parse { pos, msg: format!("bad plaquette {s:?}") })?;
    let (corner, positive) = match corner.as_bytes().last() {
        Some(b'+') => (&corner[..corner.len() - 1], true),
        Some(b'-') => (&corner[..corner.len() - 1], false),
        _ => (corner, true),
    };
    let ax = parse_site(axes, pos)?;
    if ax.dim() != 2 || ax.get(0) < 0 || ax.get(1) < 0 {
        return err(pos, "plaquette axes are a pair (i,j)");
    }
    let c = parse_site(corner, pos + axes.len() + 1)?;
    Plaquette::new(c, ax.get(0) as usize, ax.get(1) as usize, positive).map_err(|e| Error::Parse { pos, msg: e.to_string() })
}

/// One move per line: `DEF+ loop=0 loc=3 plq=(0,1)@(0,0)+`, `DEF- …`,
/// `SPLIT+ loop=0 x=2 y=7`, `SPLIT- …`. Blank lines and `#` comments are
/// skipped. Positions in errors are byte offsets into the whole text.
pub fn parse_trajectory(text: &str) -> Result<Vec<Move>> {
    let mut moves = Vec::new();
    let mut base = 0;
    for line in text.split_inclusive('\n') {
        let body = line.split('#').next().unwrap_or("");
        let toks = tokens(body, base);
        base += line.len();
        let Some(&(p0, tag)) = toks.first() else {
            continue;
        };
        let kind = match tag {
            "DEF+" => MoveKind::DeformPos,
            "DEF-" => MoveKind::DeformNeg,
            "SPLIT+" => MoveKind::SplitPos,
            "SPLIT-" => MoveKind::SplitNeg,
            _ => return err(p0, format!("unknown move {tag:?}")),
        };
        let mut loop_index = None;
        let mut x = None;
        let mut y = None;
        let mut plq = None;
        for &(p, t) in &toks[1..] {
            let (k, v) = t.split_once('=').ok_or_else(|| Error::Parse { pos: p, msg: format!("expected key=value, got {t:?}") })?;
            let num = || v.parse::<usize>().map_err(|_| Error::Parse { pos: p + k.len() + 1, msg: format!("bad number {v:?}") });
            match k {
                "loop" => loop_index = Some(num()?),
                "loc" | "x" => x = Some(num()?),
                "y" => y = Some(num()?),
                "plq" => plq = Some(parse_plaquette(v, p + k.len() + 1)?),
                _ => return err(p, format!("unknown key {k:?}")),
            }
        }
        let need = |o: Option<usize>, what: &str| o.ok_or_else(|| Error::Parse { pos: p0, msg: format!("{tag} needs {what}") });
        let mv = if kind.is_deformation() {
            let p = plq.ok_or_else(|| Error::Parse { pos: p0, msg: format!("{tag} needs plq") })?;
            Move::deform(kind, need(loop_index, "loop")?, need(x, "loc")?, p)
        } else {
            Move::split(kind, need(loop_index, "loop")?, need(x, "x")?, need(y, "y")?)
        };
        moves.push(mv);
    }
    Ok(moves)
}

pub fn format_trajectory(moves: &[Move]) -> String {
    moves.iter().map(|m| format!("{m}\n")).collect()
}

use std::collections::{BTreeSet, HashMap, HashSet};

use super::system::Word;
use super::SymbolicError;

/// Cap on the number of words materialized at a single length.
pub const MAX_LANGUAGE_WORDS: usize = 2_000_000;

/// Legal words of one fixed length.
#[derive(Debug)]
pub struct LangLevel {
    pub words: Vec<Word>,
    set: HashSet<Word>,
    /// Words of this length grouped by `w[1..len-1]`.
    pub by_middle: HashMap<Word, Vec<Word>>,
}

impl LangLevel {
    pub fn new(mut words: Vec<Word>) -> Self {
        words.sort();
        words.dedup();
        let set = words.iter().cloned().collect();
        let mut by_middle: HashMap<Word, Vec<Word>> = HashMap::new();
        for w in &words {
            if w.len() >= 2 {
                by_middle.entry(w[1..w.len() - 1].to_vec()).or_default().push(w.clone());
            }
        }
        LangLevel { words, set, by_middle }
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        self.set.contains(w)
    }
}

fn apply(images: &[Word], w: &[u8]) -> Word {
    w.iter().flat_map(|&c| images[c as usize].iter().copied()).collect()
}

/// Some power of the incidence matrix is positive. Wielandt's exponent
/// `(a-1)^2 + 1` bounds the power to test.
pub fn is_primitive(images: &[Word], a: usize) -> bool {
    let mut m = vec![vec![false; a]; a];
    for (i, img) in images.iter().enumerate() {
        for &c in img {
            m[i][c as usize] = true;
        }
    }
    let exp = (a - 1) * (a - 1) + 1;
    let mut p = m.clone();
    for _ in 1..exp {
        let mut next = vec![vec![false; a]; a];
        for i in 0..a {
            for k in 0..a {
                if p[i][k] {
                    for j in 0..a {
                        if m[k][j] {
                            next[i][j] = true;
                        }
                    }
                }
            }
        }
        p = next;
    }
    p.iter().all(|row| row.iter().all(|&x| x))
}

/// Two-letter factors of the substitution language, by closure.
pub fn legal_pairs(images: &[Word]) -> BTreeSet<(u8, u8)> {
    let mut out = BTreeSet::new();
    let mut todo = Vec::new();
    let push = |w: &[u8], out: &mut BTreeSet<(u8, u8)>, todo: &mut Vec<(u8, u8)>| {
        for p in w.windows(2) {
            if out.insert((p[0], p[1])) {
                todo.push((p[0], p[1]));
            }
        }
    };
    for img in images {
        push(img, &mut out, &mut todo);
    }
    while let Some((c, d)) = todo.pop() {
        let w = apply(images, &[c, d]);
        push(&w, &mut out, &mut todo);
    }
    out
}

/// Length-`len` factors of a primitive substitution language: all such factors
/// of `s^k(cd)` for legal pairs `cd`, where every `s^k(letter)` has length `>= len`.
pub fn substitution_words(images: &[Word], a: usize, len: usize) -> Vec<Word> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut blocks: Vec<Word> = (0..a as u8).map(|c| vec![c]).collect();
    while blocks.iter().map(Vec::len).min().unwrap_or(0) < len {
        blocks = blocks.iter().map(|b| apply(images, b)).collect();
    }
    let mut out = BTreeSet::new();
    let pairs = legal_pairs(images);
    for (c, d) in pairs {
        let mut w = blocks[c as usize].clone();
        w.extend_from_slice(&blocks[d as usize]);
        for f in w.windows(len) {
            out.insert(f.to_vec());
        }
    }
    if a == 1 {
        out.insert(blocks[0][..len].to_vec());
    }
    out.into_iter().collect()
}

fn avoids(forbidden: &[Word], w: &[u8]) -> bool {
    forbidden
        .iter()
        .all(|f| f.len() > w.len() || !w.windows(f.len()).any(|x| x == f.as_slice()))
}

/// Bi-extendable words of a subshift of finite type. `window` is at least the
/// longest forbidden word minus one.
pub fn forbidden_words(
    forbidden: &[Word],
    a: usize,
    window: usize,
    len: usize,
) -> Result<Vec<Word>, SymbolicError> {
    let total = (a as f64).powi(window as i32);
    if total > MAX_LANGUAGE_WORDS as f64 {
        return Err(SymbolicError::LanguageTooLarge(MAX_LANGUAGE_WORDS));
    }
    // vertices: allowed words of length `window`
    let mut verts: Vec<Word> = vec![Vec::new()];
    for _ in 0..window {
        verts = verts
            .into_iter()
            .flat_map(|w| {
                (0..a as u8).map(move |c| {
                    let mut x = w.clone();
                    x.push(c);
                    x
                })
            })
            .filter(|w| avoids(forbidden, w))
            .collect();
    }
    let index: HashMap<Word, usize> = verts.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); verts.len()];
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); verts.len()];
    for (i, u) in verts.iter().enumerate() {
        for c in 0..a as u8 {
            let mut e = u.clone();
            e.push(c);
            if !avoids(forbidden, &e) {
                continue;
            }
            if let Some(&j) = index.get(&e[1..]) {
                succ[i].push(j);
                pred[j].push(i);
            }
        }
    }
    // prune to the essential graph
    let mut alive = vec![true; verts.len()];
    loop {
        let mut changed = false;
        for i in 0..verts.len() {
            if alive[i]
                && (!succ[i].iter().any(|&j| alive[j]) || !pred[i].iter().any(|&j| alive[j]))
            {
                alive[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut out = BTreeSet::new();
    if len <= window {
        for (i, v) in verts.iter().enumerate() {
            if alive[i] {
                for f in v.windows(len.max(1)) {
                    out.insert(if len == 0 { Vec::new() } else { f.to_vec() });
                }
            }
        }
        return Ok(out.into_iter().collect());
    }
    let mut stack: Vec<(usize, Word)> = verts
        .iter()
        .enumerate()
        .filter(|(i, _)| alive[*i])
        .map(|(i, v)| (i, v.clone()))
        .collect();
    while let Some((i, w)) = stack.pop() {
        if w.len() == len {
            out.insert(w);
            if out.len() > MAX_LANGUAGE_WORDS {
                return Err(SymbolicError::LanguageTooLarge(MAX_LANGUAGE_WORDS));
            }
            continue;
        }
        for &j in &succ[i] {
            if alive[j] {
                let mut x = w.clone();
                x.push(*verts[j].last().expect("nonempty vertex"));
                stack.push((j, x));
            }
        }
    }
    Ok(out.into_iter().collect())
}

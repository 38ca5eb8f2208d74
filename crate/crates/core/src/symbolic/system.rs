use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use super::language::{self, LangLevel};
use super::SymbolicError;

/// A cylinder word. For odometers it is a digit prefix (least significant
/// digit first); for subshifts it is the centered block `x[-l..l)`.
pub type Word = Vec<u8>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubshiftRules {
    /// Image of each letter, indexed by letter.
    Substitution(Vec<Word>),
    Forbidden(Vec<Word>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SystemKind {
    Odometer { preperiod: Vec<u32>, period: Vec<u32> },
    Subshift { alphabet: Vec<String>, rules: SubshiftRules },
}

pub const DEFAULT_ODOMETER_DEPTH: usize = 40;
pub const DEFAULT_SUBSHIFT_DEPTH: usize = 64;

pub struct SymbolicSystem {
    kind: SystemKind,
    depth_limit: usize,
    minimal: bool,
    forbidden_window: usize,
    lang: Mutex<BTreeMap<usize, Arc<LangLevel>>>,
}

impl fmt::Debug for SymbolicSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolicSystem")
            .field("kind", &self.kind)
            .field("depth_limit", &self.depth_limit)
            .field("minimal", &self.minimal)
            .finish()
    }
}

impl SymbolicSystem {
    /// Odometer with a purely periodic base sequence.
    pub fn odometer(period: Vec<u32>) -> Result<Arc<Self>, SymbolicError> {
        Self::odometer_with(Vec::new(), period, DEFAULT_ODOMETER_DEPTH)
    }

    pub fn odometer_with(
        preperiod: Vec<u32>,
        period: Vec<u32>,
        depth_limit: usize,
    ) -> Result<Arc<Self>, SymbolicError> {
        if period.is_empty() {
            return Err(SymbolicError::InvalidSystem("empty base period".into()));
        }
        if let Some(b) = preperiod.iter().chain(&period).find(|&&b| !(2..=256).contains(&b)) {
            return Err(SymbolicError::InvalidSystem(format!(
                "odometer base entry {b} outside 2..=256"
            )));
        }
        if depth_limit == 0 {
            return Err(SymbolicError::InvalidSystem("depth_limit must be positive".into()));
        }
        Ok(Arc::new(SymbolicSystem {
            kind: SystemKind::Odometer { preperiod, period },
            depth_limit,
            minimal: true,
            forbidden_window: 0,
            lang: Mutex::new(BTreeMap::new()),
        }))
    }

    /// Substitution subshift. `images[c]` is the image of letter `c`.
    /// Only primitive substitutions are accepted.
    pub fn substitution(
        alphabet: Vec<String>,
        images: Vec<Word>,
        depth_limit: usize,
    ) -> Result<Arc<Self>, SymbolicError> {
        check_alphabet(&alphabet)?;
        if images.len() != alphabet.len() {
            return Err(SymbolicError::InvalidSystem(
                "substitution must give one image per letter".into(),
            ));
        }
        for img in &images {
            if img.is_empty() {
                return Err(SymbolicError::InvalidSystem("erasing substitution".into()));
            }
            if img.iter().any(|&c| c as usize >= alphabet.len()) {
                return Err(SymbolicError::InvalidSystem("image uses unknown letter".into()));
            }
        }
        if !language::is_primitive(&images, alphabet.len()) {
            return Err(SymbolicError::InvalidSystem(
                "substitution is not primitive".into(),
            ));
        }
        if depth_limit < 2 {
            return Err(SymbolicError::InvalidSystem("depth_limit must be at least 2".into()));
        }
        Ok(Arc::new(SymbolicSystem {
            kind: SystemKind::Subshift {
                alphabet,
                rules: SubshiftRules::Substitution(images),
            },
            depth_limit,
            minimal: true,
            forbidden_window: 0,
            lang: Mutex::new(BTreeMap::new()),
        }))
    }

    /// Subshift of finite type given by forbidden words. Never flagged minimal.
    pub fn forbidden(
        alphabet: Vec<String>,
        forbidden: Vec<Word>,
        depth_limit: usize,
    ) -> Result<Arc<Self>, SymbolicError> {
        check_alphabet(&alphabet)?;
        if forbidden.iter().any(|w| w.is_empty() || w.iter().any(|&c| c as usize >= alphabet.len())) {
            return Err(SymbolicError::InvalidSystem("bad forbidden word".into()));
        }
        if depth_limit < 2 {
            return Err(SymbolicError::InvalidSystem("depth_limit must be at least 2".into()));
        }
        let window = forbidden.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1).max(1);
        let sys = SymbolicSystem {
            kind: SystemKind::Subshift {
                alphabet,
                rules: SubshiftRules::Forbidden(forbidden),
            },
            depth_limit,
            minimal: false,
            forbidden_window: window,
            lang: Mutex::new(BTreeMap::new()),
        };
        if sys.language(2)?.words.is_empty() {
            return Err(SymbolicError::InvalidSystem("the subshift is empty".into()));
        }
        Ok(Arc::new(sys))
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    pub fn depth_limit(&self) -> usize {
        self.depth_limit
    }

    pub fn is_minimal(&self) -> bool {
        self.minimal
    }

    pub fn is_odometer(&self) -> bool {
        matches!(self.kind, SystemKind::Odometer { .. })
    }

    /// Base of the digit at 0-based position `i` (odometers only).
    pub fn base_at(&self, i: usize) -> u32 {
        match &self.kind {
            SystemKind::Odometer { preperiod, period } => {
                if i < preperiod.len() {
                    preperiod[i]
                } else {
                    period[(i - preperiod.len()) % period.len()]
                }
            }
            SystemKind::Subshift { .. } => panic!("base_at on a subshift"),
        }
    }

    /// Product of the first `depth` base entries.
    pub fn modulus(&self, depth: usize) -> Result<u128, SymbolicError> {
        self.check_depth(depth)?;
        let mut p: u128 = 1;
        for i in 0..depth {
            p = p.checked_mul(self.base_at(i) as u128).ok_or(SymbolicError::DepthExceeded {
                requested: depth,
                limit: i,
            })?;
        }
        Ok(p)
    }

    /// Number of symbols in the alphabet (digits of the first base for odometers).
    pub fn symbol_names(&self, position: usize) -> Vec<String> {
        match &self.kind {
            SystemKind::Odometer { .. } => {
                (0..self.base_at(position)).map(|d| d.to_string()).collect()
            }
            SystemKind::Subshift { alphabet, .. } => alphabet.clone(),
        }
    }

    fn dotted(&self) -> bool {
        match &self.kind {
            SystemKind::Odometer { preperiod, period } => {
                preperiod.iter().chain(period).any(|&b| b > 10)
            }
            SystemKind::Subshift { alphabet, .. } => alphabet.iter().any(|s| s.chars().count() != 1),
        }
    }

    pub fn format_word(&self, w: &[u8]) -> String {
        let names: Vec<String> = match &self.kind {
            SystemKind::Odometer { .. } => w.iter().map(|d| d.to_string()).collect(),
            SystemKind::Subshift { alphabet, .. } => {
                w.iter().map(|&c| alphabet[c as usize].clone()).collect()
            }
        };
        if self.dotted() {
            names.join(".")
        } else {
            names.concat()
        }
    }

    /// Parses a word written in the symbol names; does not check legality.
    pub fn parse_symbols(&self, s: &str) -> Result<Word, SymbolicError> {
        if s.is_empty() {
            return Ok(Vec::new());
        }
        let parts: Vec<String> = if self.dotted() {
            s.split('.').map(str::to_string).collect()
        } else {
            s.chars().map(|c| c.to_string()).collect()
        };
        let bad = || SymbolicError::InvalidWord(s.to_string());
        match &self.kind {
            SystemKind::Odometer { .. } => parts
                .iter()
                .map(|p| p.parse::<u16>().ok().filter(|&d| d < 256).map(|d| d as u8).ok_or_else(bad))
                .collect(),
            SystemKind::Subshift { alphabet, .. } => parts
                .iter()
                .map(|p| alphabet.iter().position(|a| a == p).map(|i| i as u8).ok_or_else(bad))
                .collect(),
        }
    }

    /// Parses and validates a cylinder word.
    pub fn parse_word(&self, s: &str) -> Result<Word, SymbolicError> {
        let w = self.parse_symbols(s)?;
        self.validate(&w)?;
        Ok(w)
    }

    pub(crate) fn check_depth(&self, depth: usize) -> Result<(), SymbolicError> {
        let requested = match self.kind {
            SystemKind::Odometer { .. } => depth,
            SystemKind::Subshift { .. } => 2 * depth,
        };
        if requested > self.depth_limit {
            return Err(SymbolicError::DepthExceeded {
                requested,
                limit: self.depth_limit,
            });
        }
        Ok(())
    }

    /// Depth of a cylinder word.
    pub fn word_depth(&self, w: &[u8]) -> usize {
        match self.kind {
            SystemKind::Odometer { .. } => w.len(),
            SystemKind::Subshift { .. } => w.len() / 2,
        }
    }

    /// Checks that `w` names a nonempty cylinder within the depth budget.
    pub fn validate(&self, w: &[u8]) -> Result<(), SymbolicError> {
        let bad = || SymbolicError::InvalidWord(self.format_word(w));
        match &self.kind {
            SystemKind::Odometer { .. } => {
                self.check_depth(w.len())?;
                for (i, &d) in w.iter().enumerate() {
                    if d as u32 >= self.base_at(i) {
                        return Err(bad());
                    }
                }
                Ok(())
            }
            SystemKind::Subshift { alphabet, .. } => {
                if w.len() % 2 != 0 || w.iter().any(|&c| c as usize >= alphabet.len()) {
                    return Err(bad());
                }
                self.check_depth(w.len() / 2)?;
                if !self.language(w.len())?.contains(w) {
                    return Err(bad());
                }
                Ok(())
            }
        }
    }

    pub fn parent(&self, w: &[u8]) -> Option<Word> {
        if w.is_empty() {
            return None;
        }
        match self.kind {
            SystemKind::Odometer { .. } => Some(w[..w.len() - 1].to_vec()),
            SystemKind::Subshift { .. } => Some(w[1..w.len() - 1].to_vec()),
        }
    }

    /// True iff the cylinder of `w` is contained in the cylinder of `u`.
    pub fn is_ancestor_or_eq(&self, u: &[u8], w: &[u8]) -> bool {
        if u.len() > w.len() {
            return false;
        }
        match self.kind {
            SystemKind::Odometer { .. } => w.starts_with(u),
            SystemKind::Subshift { .. } => {
                let j = (w.len() - u.len()) / 2;
                &w[j..j + u.len()] == u
            }
        }
    }

    /// Cylinders one level below `w`.
    pub fn children(&self, w: &[u8]) -> Result<Vec<Word>, SymbolicError> {
        match &self.kind {
            SystemKind::Odometer { .. } => {
                self.check_depth(w.len() + 1)?;
                Ok((0..self.base_at(w.len()))
                    .map(|d| {
                        let mut c = w.to_vec();
                        c.push(d as u8);
                        c
                    })
                    .collect())
            }
            SystemKind::Subshift { .. } => {
                let level = self.language(w.len() + 2)?;
                Ok(level.by_middle.get(w).cloned().unwrap_or_default())
            }
        }
    }

    /// All cylinders at `depth` refining `w`, sorted.
    pub fn descendants_at_depth(&self, w: &[u8], depth: usize) -> Result<Vec<Word>, SymbolicError> {
        let own = self.word_depth(w);
        if depth < own {
            return Err(SymbolicError::InvalidWord(format!(
                "cannot refine {} to smaller depth {depth}",
                self.format_word(w)
            )));
        }
        self.check_depth(depth)?;
        match &self.kind {
            SystemKind::Odometer { .. } => {
                let mut out = vec![w.to_vec()];
                for i in own..depth {
                    let b = self.base_at(i);
                    out = out
                        .into_iter()
                        .flat_map(|p| {
                            (0..b).map(move |d| {
                                let mut c = p.clone();
                                c.push(d as u8);
                                c
                            })
                        })
                        .collect();
                }
                out.sort();
                Ok(out)
            }
            SystemKind::Subshift { .. } => {
                let level = self.language(2 * depth)?;
                let off = depth - own;
                Ok(level
                    .words
                    .iter()
                    .filter(|u| &u[off..off + w.len()] == w)
                    .cloned()
                    .collect())
            }
        }
    }

    /// Residue of an odometer cylinder in `Z / modulus(len)`.
    pub fn odometer_value(&self, w: &[u8]) -> u128 {
        let mut v: u128 = 0;
        let mut p: u128 = 1;
        for (i, &d) in w.iter().enumerate() {
            v += d as u128 * p;
            p *= self.base_at(i) as u128;
        }
        v
    }

    pub fn odometer_word(&self, mut value: u128, depth: usize) -> Word {
        let mut w = Vec::with_capacity(depth);
        for i in 0..depth {
            let b = self.base_at(i) as u128;
            w.push((value % b) as u8);
            value /= b;
        }
        w
    }

    /// Exact image `n * [w]` as a list of cylinders.
    pub fn translate_cylinder(&self, w: &[u8], n: i64) -> Result<Vec<Word>, SymbolicError> {
        if n == 0 || w.is_empty() {
            return Ok(vec![w.to_vec()]);
        }
        match &self.kind {
            SystemKind::Odometer { .. } => {
                let p = self.modulus(w.len())? as i128;
                let v = self.odometer_value(w) as i128;
                let t = (v + n as i128).rem_euclid(p) as u128;
                Ok(vec![self.odometer_word(t, w.len())])
            }
            SystemKind::Subshift { .. } => {
                let l = w.len() / 2;
                let a = n.unsigned_abs() as usize;
                let depth = l + a;
                self.check_depth(depth)?;
                let level = self.language(2 * depth)?;
                // y in n.[w] iff y[-l-n .. l-n) = w
                let off = (a as i64 - n) as usize;
                Ok(level
                    .words
                    .iter()
                    .filter(|u| &u[off..off + w.len()] == w)
                    .cloned()
                    .collect())
            }
        }
    }

    /// Language of the subshift at the given word length.
    pub fn language(&self, len: usize) -> Result<Arc<LangLevel>, SymbolicError> {
        let SystemKind::Subshift { alphabet, rules } = &self.kind else {
            return Err(SymbolicError::InvalidSystem("odometers have no language".into()));
        };
        if len > self.depth_limit {
            return Err(SymbolicError::DepthExceeded {
                requested: len,
                limit: self.depth_limit,
            });
        }
        if let Some(l) = self.lang.lock().expect("language cache poisoned").get(&len) {
            return Ok(l.clone());
        }
        let words = match rules {
            SubshiftRules::Substitution(images) => language::substitution_words(images, alphabet.len(), len),
            SubshiftRules::Forbidden(f) => {
                language::forbidden_words(f, alphabet.len(), self.forbidden_window, len)?
            }
        };
        let level = Arc::new(LangLevel::new(words));
        self.lang
            .lock()
            .expect("language cache poisoned")
            .insert(len, level.clone());
        Ok(level)
    }
}

fn check_alphabet(alphabet: &[String]) -> Result<(), SymbolicError> {
    if alphabet.is_empty() || alphabet.len() > 256 {
        return Err(SymbolicError::InvalidSystem("alphabet size must be in 1..=256".into()));
    }
    let mut sorted = alphabet.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != alphabet.len() || alphabet.iter().any(|s| s.is_empty() || s.contains('.')) {
        return Err(SymbolicError::InvalidSystem("alphabet symbols must be distinct and nonempty".into()));
    }
    Ok(())
}

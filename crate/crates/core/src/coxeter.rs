//! The affine Weyl groups of types C2 and G2.
//!
//! Elements are represented by their faithful action on the plane as
//! integer affine maps. Descents are read off geometrically: `s` is a left
//! descent of `w` exactly when the wall of `s` separates the fundamental
//! alcove from its image under `w`. This gives lengths and ShortLex normal
//! forms for arbitrary elements without any rewriting system.
//!
//! A [`Universe`] is the finite ball of all elements up to a given length,
//! indexed in ShortLex order, with multiplication tables by generators,
//! inverses and Bruhat order. Elements inside a universe are handled by the
//! cheap [`Elem`] index.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Gen = u8;

pub const RANK: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("cannot parse element {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("element {word} lies outside the ball of radius {radius}")]
    OutOfBall { word: String, radius: usize },
    #[error("power of {word} is not length-additive")]
    NotAdditive { word: String },
    #[error("parabolic subgroup generated by {gens} is infinite")]
    InfiniteParabolic { gens: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupType {
    C2,
    G2,
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupType::C2 => "C2",
            GroupType::G2 => "G2",
        })
    }
}

impl FromStr for GroupType {
    type Err = GroupError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "C2" | "C~2" | "AFFINE-C2" => Ok(GroupType::C2),
            "G2" | "G~2" | "AFFINE-G2" => Ok(GroupType::G2),
            _ => Err(GroupError::Parse {
                input: s.to_string(),
                reason: "group type must be C2 or G2".into(),
            }),
        }
    }
}

/// A set of simple reflections, stored as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenSet(u8);

impl GenSet {
    pub const EMPTY: GenSet = GenSet(0);
    pub const ALL: GenSet = GenSet(0b111);

    pub fn from_gens(gens: &[Gen]) -> Self {
        gens.iter().fold(GenSet(0), |acc, &s| acc.with(s))
    }

    pub fn with(self, s: Gen) -> Self {
        GenSet(self.0 | (1 << s))
    }

    pub fn contains(self, s: Gen) -> bool {
        self.0 & (1 << s) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: GenSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Gen> {
        (0..RANK as Gen).filter(move |&s| self.contains(s))
    }
}

impl fmt::Debug for GenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for GenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A word in the generators. The empty word is written `e`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Gen>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Gen] {
        &self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for &s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = GroupError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "e" || t.is_empty() {
            return Ok(Word(Vec::new()));
        }
        t.chars()
            .map(|ch| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                '2' => Ok(2),
                _ => Err(GroupError::Parse {
                    input: s.to_string(),
                    reason: format!("unexpected character {ch:?}; expected digits 0, 1, 2 or 'e'"),
                }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

/// The affine map `x -> m x + t` on integer coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AffineMap {
    m: [[i64; 2]; 2],
    t: [i64; 2],
}

impl AffineMap {
    pub const IDENTITY: AffineMap = AffineMap {
        m: [[1, 0], [0, 1]],
        t: [0, 0],
    };

    const fn new(m: [[i64; 2]; 2], t: [i64; 2]) -> Self {
        Self { m, t }
    }

    /// `self ∘ other`, i.e. the map applying `other` first.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        let a = &self.m;
        let b = &other.m;
        let m = [
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ];
        let t = [
            a[0][0] * other.t[0] + a[0][1] * other.t[1] + self.t[0],
            a[1][0] * other.t[0] + a[1][1] * other.t[1] + self.t[1],
        ];
        AffineMap { m, t }
    }

    pub fn inverse(&self) -> AffineMap {
        let m = &self.m;
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        debug_assert!(det == 1 || det == -1);
        let inv = [
            [m[1][1] * det, -m[0][1] * det],
            [-m[1][0] * det, m[0][0] * det],
        ];
        let t = [
            -(inv[0][0] * self.t[0] + inv[0][1] * self.t[1]),
            -(inv[1][0] * self.t[0] + inv[1][1] * self.t[1]),
        ];
        AffineMap { m: inv, t }
    }

    /// Image of the rational point `p / den`, returned scaled by `den`.
    fn apply_scaled(&self, p: [i64; 2], den: i64) -> [i64; 2] {
        [
            self.m[0][0] * p[0] + self.m[0][1] * p[1] + self.t[0] * den,
            self.m[1][0] * p[0] + self.m[1][1] * p[1] + self.t[1] * den,
        ]
    }
}

/// The affine functional `x -> a.x + c` whose zero set is a wall of the
/// fundamental alcove, positive on the alcove.
#[derive(Clone, Copy, Debug)]
struct Wall {
    a: [i64; 2],
    c: i64,
}

impl Wall {
    fn sign_scaled(&self, p: [i64; 2], den: i64) -> i64 {
        self.a[0] * p[0] + self.a[1] * p[1] + self.c * den
    }
}

/// One of the two affine Weyl groups, with its geometric realisation.
#[derive(Clone, Debug)]
pub struct CoxeterSystem {
    ty: GroupType,
    gens: [AffineMap; RANK],
    walls: [Wall; RANK],
    point: [i64; 2],
    den: i64,
}

impl CoxeterSystem {
    pub fn new(ty: GroupType) -> Self {
        match ty {
            GroupType::C2 => Self {
                ty,
                gens: [
                    AffineMap::new([[-1, 0], [-2, 1]], [1, 1]),
                    AffineMap::new([[-1, 1], [0, 1]], [0, 0]),
                    AffineMap::new([[1, 0], [2, -1]], [0, 0]),
                ],
                walls: [
                    Wall { a: [-2, 0], c: 1 },
                    Wall { a: [2, -1], c: 0 },
                    Wall { a: [-2, 2], c: 0 },
                ],
                point: [3, 4],
                den: 10,
            },
            GroupType::G2 => Self {
                ty,
                gens: [
                    AffineMap::new([[-1, 0], [-1, 1]], [2, 1]),
                    AffineMap::new([[-1, 3], [0, 1]], [0, 0]),
                    AffineMap::new([[1, 0], [1, -1]], [0, 0]),
                ],
                walls: [
                    Wall { a: [-1, 0], c: 1 },
                    Wall { a: [2, -3], c: 0 },
                    Wall { a: [-1, 2], c: 0 },
                ],
                point: [16, 9],
                den: 20,
            },
        }
    }

    pub fn group_type(&self) -> GroupType {
        self.ty
    }

    /// Order of `st`.
    pub fn coxeter_order(&self, s: Gen, t: Gen) -> u32 {
        if s == t {
            return 1;
        }
        let pair = (s.min(t), s.max(t));
        match (self.ty, pair) {
            (_, (0, 2)) => 2,
            (GroupType::C2, _) => 4,
            (GroupType::G2, (0, 1)) => 3,
            (GroupType::G2, _) => 6,
        }
    }

    pub fn generator(&self, s: Gen) -> AffineMap {
        self.gens[s as usize]
    }

    pub fn from_word(&self, word: &[Gen]) -> AffineMap {
        word.iter().fold(AffineMap::IDENTITY, |acc, &s| {
            acc.compose(&self.gens[s as usize])
        })
    }

    pub fn parse(&self, text: &str) -> Result<AffineMap, GroupError> {
        let w: Word = text.parse()?;
        Ok(self.from_word(&w.0))
    }

    pub fn is_left_descent(&self, w: &AffineMap, s: Gen) -> bool {
        let img = w.apply_scaled(self.point, self.den);
        self.walls[s as usize].sign_scaled(img, self.den) < 0
    }

    pub fn is_right_descent(&self, w: &AffineMap, s: Gen) -> bool {
        self.is_left_descent(&w.inverse(), s)
    }

    pub fn left_descents(&self, w: &AffineMap) -> GenSet {
        (0..RANK as Gen)
            .filter(|&s| self.is_left_descent(w, s))
            .fold(GenSet::EMPTY, GenSet::with)
    }

    pub fn right_descents(&self, w: &AffineMap) -> GenSet {
        self.left_descents(&w.inverse())
    }

    /// The ShortLex-least reduced word of `w`.
    pub fn reduced_word(&self, w: &AffineMap) -> Word {
        let mut cur = *w;
        let mut out = Vec::new();
        while cur != AffineMap::IDENTITY {
            let s = (0..RANK as Gen)
                .find(|&s| self.is_left_descent(&cur, s))
                .expect("non-identity element has a left descent");
            out.push(s);
            cur = self.gens[s as usize].compose(&cur);
        }
        Word(out)
    }

    pub fn length(&self, w: &AffineMap) -> usize {
        self.reduced_word(w).len()
    }

    /// Elements `w` with `l(w) <= radius` such that `l(w^-1 target) =
    /// l(target) - l(w)`.
    pub fn duflo_prefixes(&self, target: &AffineMap, radius: usize) -> HashSet<AffineMap> {
        let mut seen: HashSet<AffineMap> = HashSet::new();
        let mut stack = vec![(AffineMap::IDENTITY, *target, 0usize)];
        seen.insert(AffineMap::IDENTITY);
        while let Some((w, rest, len)) = stack.pop() {
            if len == radius {
                continue;
            }
            for s in self.left_descents(&rest).iter() {
                let g = self.gens[s as usize];
                let next = w.compose(&g);
                if seen.insert(next) {
                    stack.push((next, g.compose(&rest), len + 1));
                }
            }
        }
        seen
    }

    /// `U(p)` truncated to length `radius`: all prefixes, in the weak order
    /// sense, of the powers `p^k`.
    ///
    /// Powers are taken from the least `k` with `l(p^k) >= radius + l(p)` and
    /// increased until the truncated prefix set is unchanged for two
    /// consecutive powers.
    pub fn duflo_closure(
        &self,
        p: &AffineMap,
        radius: usize,
    ) -> Result<HashSet<AffineMap>, GroupError> {
        let lp = self.length(p);
        if lp == 0 {
            return Ok(HashSet::from([AffineMap::IDENTITY]));
        }
        let mut k = (radius + lp).div_ceil(lp).max(1);
        let mut power = (0..k).fold(AffineMap::IDENTITY, |acc, _| acc.compose(p));
        if self.length(&power) != k * lp {
            return Err(GroupError::NotAdditive {
                word: self.reduced_word(p).to_string(),
            });
        }
        let mut current = self.duflo_prefixes(&power, radius);
        let mut unchanged = 0;
        while unchanged < 2 {
            k += 1;
            power = power.compose(p);
            if self.length(&power) != k * lp {
                return Err(GroupError::NotAdditive {
                    word: self.reduced_word(p).to_string(),
                });
            }
            let next = self.duflo_prefixes(&power, radius);
            if next.len() == current.len() {
                unchanged += 1;
            } else {
                unchanged = 0;
            }
            current = next;
        }
        Ok(current)
    }

    /// Longest element of the finite parabolic subgroup `W_I`.
    pub fn parabolic_longest(&self, gens: GenSet) -> Result<AffineMap, GroupError> {
        if gens == GenSet::ALL {
            return Err(GroupError::InfiniteParabolic {
                gens: gens.to_string(),
            });
        }
        let mut seen = HashSet::from([AffineMap::IDENTITY]);
        let mut queue = VecDeque::from([AffineMap::IDENTITY]);
        let mut longest = (AffineMap::IDENTITY, 0);
        while let Some(w) = queue.pop_front() {
            for s in gens.iter() {
                let next = w.compose(&self.gens[s as usize]);
                if seen.insert(next) {
                    let len = self.length(&next);
                    if len > longest.1 {
                        longest = (next, len);
                    }
                    queue.push_back(next);
                }
            }
        }
        Ok(longest.0)
    }
}

/// Index of an element inside a [`Universe`]. Indices follow ShortLex order,
/// so comparing indices compares first by length and then lexicographically
/// by normal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Elem(pub u32);

impl Elem {
    pub const IDENTITY: Elem = Elem(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(n: usize) -> Self {
        BitSet(vec![0; n.div_ceil(64)])
    }
    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            (0..64)
                .filter(move |b| w & (1 << b) != 0)
                .map(move |b| k * 64 + b)
        })
    }
}

/// All elements of length at most `radius` (optionally inside a parabolic
/// subgroup) with their multiplication tables.
pub struct Universe {
    system: CoxeterSystem,
    generators: GenSet,
    radius: usize,
    maps: Vec<AffineMap>,
    words: Vec<Word>,
    lengths: Vec<usize>,
    level_end: Vec<usize>,
    index: HashMap<AffineMap, Elem>,
    left: [Vec<Option<Elem>>; RANK],
    right: [Vec<Option<Elem>>; RANK],
    left_desc: Vec<GenSet>,
    right_desc: Vec<GenSet>,
    inverse: Vec<Elem>,
    bruhat: OnceLock<Vec<BitSet>>,
}

impl fmt::Debug for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Universe")
            .field("type", &self.system.ty)
            .field("generators", &self.generators)
            .field("radius", &self.radius)
            .field("size", &self.maps.len())
            .finish()
    }
}

impl Universe {
    pub fn new(ty: GroupType, radius: usize) -> Self {
        Self::build(CoxeterSystem::new(ty), GenSet::ALL, radius)
    }

    /// The ball of radius `radius` in the parabolic subgroup generated by
    /// `gens`.
    pub fn parabolic(ty: GroupType, gens: GenSet, radius: usize) -> Self {
        Self::build(CoxeterSystem::new(ty), gens, radius)
    }

    fn build(system: CoxeterSystem, generators: GenSet, radius: usize) -> Self {
        let mut maps = vec![AffineMap::IDENTITY];
        let mut words = vec![Word::default()];
        let mut lengths = vec![0];
        let mut level_end = vec![1];
        let mut index = HashMap::from([(AffineMap::IDENTITY, Elem(0))]);
        let mut level_start = 0;
        for len in 1..=radius {
            let mut level: Vec<(Word, AffineMap)> = Vec::new();
            let mut fresh = HashSet::new();
            for m in &maps[level_start..] {
                for s in generators.iter() {
                    let next = m.compose(&system.gens[s as usize]);
                    if !index.contains_key(&next) && fresh.insert(next) {
                        let word = system.reduced_word(&next);
                        assert_eq!(
                            word.len(),
                            len,
                            "breadth-first depth disagrees with geometric length"
                        );
                        level.push((word, next));
                    }
                }
            }
            if level.is_empty() {
                break;
            }
            level.sort_by(|a, b| a.0.cmp(&b.0));
            level_start = maps.len();
            for (word, map) in level {
                index.insert(map, Elem(maps.len() as u32));
                maps.push(map);
                words.push(word);
                lengths.push(len);
            }
            level_end.push(maps.len());
        }
        let n = maps.len();
        let mut left: [Vec<Option<Elem>>; RANK] = Default::default();
        let mut right: [Vec<Option<Elem>>; RANK] = Default::default();
        let mut left_desc = vec![GenSet::EMPTY; n];
        let mut right_desc = vec![GenSet::EMPTY; n];
        for s in 0..RANK {
            let g = system.gens[s];
            left[s] = maps
                .iter()
                .map(|m| index.get(&g.compose(m)).copied())
                .collect();
            right[s] = maps
                .iter()
                .map(|m| index.get(&m.compose(&g)).copied())
                .collect();
        }
        for (i, m) in maps.iter().enumerate() {
            for s in generators.iter() {
                if system.is_left_descent(m, s) {
                    left_desc[i] = left_desc[i].with(s);
                }
                if system.is_right_descent(m, s) {
                    right_desc[i] = right_desc[i].with(s);
                }
            }
        }
        let inverse = maps.iter().map(|m| index[&m.inverse()]).collect();
        Universe {
            system,
            generators,
            radius,
            maps,
            words,
            lengths,
            level_end,
            index,
            left,
            right,
            left_desc,
            right_desc,
            inverse,
            bruhat: OnceLock::new(),
        }
    }

    pub fn system(&self) -> &CoxeterSystem {
        &self.system
    }

    pub fn group_type(&self) -> GroupType {
        self.system.ty
    }

    pub fn generators(&self) -> GenSet {
        self.generators
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn identity(&self) -> Elem {
        Elem::IDENTITY
    }

    pub fn elements(&self) -> impl DoubleEndedIterator<Item = Elem> + ExactSizeIterator {
        (0..self.maps.len() as u32).map(Elem)
    }

    /// Elements of length at most `r`, in ShortLex order.
    pub fn ball(&self, r: usize) -> impl DoubleEndedIterator<Item = Elem> + ExactSizeIterator {
        let end = self.level_end[r.min(self.level_end.len() - 1)];
        (0..end as u32).map(Elem)
    }

    pub fn ball_size(&self, r: usize) -> usize {
        self.level_end[r.min(self.level_end.len() - 1)]
    }

    /// Number of elements of each length `0..=radius`.
    pub fn growth(&self) -> Vec<usize> {
        let mut prev = 0;
        self.level_end
            .iter()
            .map(|&end| {
                let n = end - prev;
                prev = end;
                n
            })
            .collect()
    }

    pub fn length(&self, x: Elem) -> usize {
        self.lengths[x.index()]
    }

    pub fn word(&self, x: Elem) -> &Word {
        &self.words[x.index()]
    }

    pub fn map(&self, x: Elem) -> &AffineMap {
        &self.maps[x.index()]
    }

    pub fn format(&self, x: Elem) -> String {
        self.words[x.index()].to_string()
    }

    pub fn find(&self, m: &AffineMap) -> Option<Elem> {
        self.index.get(m).copied()
    }

    pub fn elem_of(&self, m: &AffineMap) -> Result<Elem, GroupError> {
        self.find(m).ok_or_else(|| GroupError::OutOfBall {
            word: self.system.reduced_word(m).to_string(),
            radius: self.radius,
        })
    }

    /// Parses a word (not necessarily reduced) and locates the element.
    pub fn parse(&self, text: &str) -> Result<Elem, GroupError> {
        let w: Word = text.parse()?;
        if let Some(&s) = w.0.iter().find(|&&s| !self.generators.contains(s)) {
            return Err(GroupError::Parse {
                input: text.to_string(),
                reason: format!("generator {s} is not in this subgroup"),
            });
        }
        self.elem_of(&self.system.from_word(&w.0))
    }

    pub fn from_word(&self, word: &[Gen]) -> Result<Elem, GroupError> {
        self.elem_of(&self.system.from_word(word))
    }

    /// `s x`, if it lies in the ball.
    pub fn left_gen(&self, s: Gen, x: Elem) -> Option<Elem> {
        self.left[s as usize][x.index()]
    }

    /// `x s`, if it lies in the ball.
    pub fn right_gen(&self, x: Elem, s: Gen) -> Option<Elem> {
        self.right[s as usize][x.index()]
    }

    pub fn left_descents(&self, x: Elem) -> GenSet {
        self.left_desc[x.index()]
    }

    pub fn right_descents(&self, x: Elem) -> GenSet {
        self.right_desc[x.index()]
    }

    /// Generators appearing in any (equivalently every) reduced word.
    pub fn support(&self, x: Elem) -> GenSet {
        GenSet::from_gens(&self.words[x.index()].0)
    }

    pub fn inverse(&self, x: Elem) -> Elem {
        self.inverse[x.index()]
    }

    pub fn mul(&self, x: Elem, y: Elem) -> Result<Elem, GroupError> {
        self.elem_of(&self.maps[x.index()].compose(&self.maps[y.index()]))
    }

    /// The product together with whether `l(xy) = l(x) + l(y)`.
    pub fn mul_additive(&self, x: Elem, y: Elem) -> Result<(Elem, bool), GroupError> {
        let z = self.mul(x, y)?;
        Ok((z, self.length(z) == self.length(x) + self.length(y)))
    }

    /// Length of `x^-1 y`, computed even if that element is outside the ball.
    pub fn length_of_quotient(&self, x: Elem, y: Elem) -> usize {
        let m = self.maps[x.index()]
            .inverse()
            .compose(&self.maps[y.index()]);
        self.system.length(&m)
    }

    /// `x <=_D y`: `l(x^-1 y) = l(y) - l(x)`.
    pub fn duflo_leq(&self, x: Elem, y: Elem) -> bool {
        let (lx, ly) = (self.length(x), self.length(y));
        lx <= ly && self.length_of_quotient(x, y) == ly - lx
    }

    fn bruhat_sets(&self) -> &Vec<BitSet> {
        self.bruhat.get_or_init(|| {
            let n = self.len();
            let mut sets: Vec<BitSet> = Vec::with_capacity(n);
            let mut id = BitSet::new(n);
            id.insert(0);
            sets.push(id);
            for y in 1..n {
                let s = self.words[y].0[0];
                let sy = self.left[s as usize][y].expect("prefix of a ball element is in the ball");
                let mut set = sets[sy.index()].clone();
                let shifted: Vec<usize> = sets[sy.index()]
                    .iter()
                    .map(|x| {
                        self.left[s as usize][x]
                            .expect("Bruhat-lower element stays in ball")
                            .index()
                    })
                    .collect();
                for x in shifted {
                    set.insert(x);
                }
                set.insert(y);
                sets.push(set);
            }
            sets
        })
    }

    pub fn bruhat_leq(&self, x: Elem, y: Elem) -> bool {
        x == y
            || (self.length(x) < self.length(y)
                && self.bruhat_sets()[y.index()].contains(x.index()))
    }

    /// All `x <= y` in Bruhat order, in ShortLex order.
    pub fn bruhat_lower(&self, y: Elem) -> Vec<Elem> {
        self.bruhat_sets()[y.index()]
            .iter()
            .map(|i| Elem(i as u32))
            .collect()
    }

    /// `U(p)` truncated to length `radius` (at most the universe radius),
    /// in ShortLex order.
    pub fn duflo_closure(&self, p: Elem, radius: usize) -> Result<Vec<Elem>, GroupError> {
        let r = radius.min(self.radius);
        let set = self.system.duflo_closure(self.map(p), r)?;
        let mut out: Vec<Elem> = set
            .iter()
            .map(|m| self.find(m).expect("truncated prefixes lie in the ball"))
            .collect();
        out.sort();
        Ok(out)
    }

    pub fn parabolic_longest(&self, gens: GenSet) -> Result<Elem, GroupError> {
        let m = self.system.parabolic_longest(gens)?;
        self.elem_of(&m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order_of(m: AffineMap) -> u32 {
        let mut acc = m;
        for k in 1..20 {
            if acc == AffineMap::IDENTITY {
                return k;
            }
            acc = acc.compose(&m);
        }
        0
    }

    #[test]
    fn generators_satisfy_coxeter_relations() {
        for ty in [GroupType::C2, GroupType::G2] {
            let sys = CoxeterSystem::new(ty);
            for s in 0..3u8 {
                for t in 0..3u8 {
                    let st = sys.generator(s).compose(&sys.generator(t));
                    assert_eq!(order_of(st), sys.coxeter_order(s, t), "{ty} {s}{t}");
                }
            }
        }
    }

    #[test]
    fn growth_matches_known_counts() {
        let u = Universe::new(GroupType::C2, 10);
        assert_eq!(u.growth(), vec![1, 3, 5, 8, 11, 13, 16, 19, 21, 24, 27]);
        let u = Universe::new(GroupType::G2, 10);
        assert_eq!(u.growth(), vec![1, 3, 5, 7, 9, 12, 15, 17, 19, 21, 24]);
    }

    #[test]
    fn parse_and_multiply() {
        let u = Universe::new(GroupType::C2, 6);
        let x = u.parse("01").unwrap();
        let y = u.parse("1").unwrap();
        let (z, additive) = u.mul_additive(x, y).unwrap();
        assert_eq!(u.format(z), "0");
        assert!(!additive);
        assert_eq!(u.format(u.parse("20").unwrap()), "02");
        assert_eq!(u.parse("00").unwrap(), Elem::IDENTITY);
        assert!(matches!(
            u.parse("0121012"),
            Err(GroupError::OutOfBall { .. })
        ));
        assert!(matches!(u.parse("013"), Err(GroupError::Parse { .. })));
    }

    #[test]
    fn parabolic_longest_elements() {
        let u = Universe::new(GroupType::C2, 8);
        let f = |g: &[Gen]| u.format(u.parabolic_longest(GenSet::from_gens(g)).unwrap());
        assert_eq!(f(&[0, 1]), "0101");
        assert_eq!(f(&[1, 2]), "1212");
        assert_eq!(f(&[0, 2]), "02");
        assert_eq!(f(&[]), "e");
        assert!(u.parabolic_longest(GenSet::ALL).is_err());
        let g = Universe::new(GroupType::G2, 8);
        assert_eq!(
            g.format(g.parabolic_longest(GenSet::from_gens(&[1, 2])).unwrap()),
            "121212"
        );
        assert_eq!(
            g.format(g.parabolic_longest(GenSet::from_gens(&[0, 1])).unwrap()),
            "010"
        );
    }
}

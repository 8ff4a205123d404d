//! Brute-force oracles shared by the integration tests. None of these call
//! into the code they are used to check.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use forge_core::presentations::FinitePresentation;
use forge_core::squarecx::{DirEdge, SquareComplex};
use forge_core::words::{Letter, Word};

/// Letters as nonzero integers: `k` is generator `k - 1`, `-k` its inverse.
pub type Raw = Vec<i8>;

pub fn reduce(letters: &[i8]) -> Raw {
    let mut out: Raw = Vec::with_capacity(letters.len());
    for &x in letters {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

pub fn inverse(w: &[i8]) -> Raw {
    w.iter().rev().map(|x| -x).collect()
}

pub fn product(u: &[i8], v: &[i8]) -> Raw {
    let mut all = u.to_vec();
    all.extend_from_slice(v);
    reduce(&all)
}

pub fn to_word(w: &[i8], names: &[&str]) -> Word {
    let text: Vec<String> = w
        .iter()
        .map(|&x| {
            let name = names[x.unsigned_abs() as usize - 1];
            if x > 0 {
                name.to_string()
            } else {
                format!("{name}^-1")
            }
        })
        .collect();
    Word::parse(&text.join(" ")).unwrap()
}

pub fn raw_of(p: &FinitePresentation, w: &Word) -> Raw {
    w.letters()
        .iter()
        .map(|l: &Letter| {
            let i = p.alphabet().index_of(&l.generator).unwrap() as i8 + 1;
            if l.sign() > 0 {
                i
            } else {
                -i
            }
        })
        .collect()
}

/// Every freely reduced word of length at most `max_len` on `rank` letters.
pub fn reduced_words(rank: usize, max_len: usize) -> Vec<Raw> {
    let letters: Vec<i8> = (1..=rank as i8).flat_map(|k| [k, -k]).collect();
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &x in &letters {
                if w.last() != Some(&-x) {
                    let mut v: Raw = w.clone();
                    v.push(x);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Replaces generators by shorter products `x^±1 y^±1` until none is
/// available, dropping trivial and repeated generators.
pub fn nielsen_shorten(gens: &[Raw]) -> Vec<Raw> {
    let mut xs: Vec<Raw> = gens.iter().map(|g| reduce(g)).collect();
    loop {
        xs.retain(|x| !x.is_empty());
        let mut seen: Vec<Raw> = Vec::new();
        xs.retain(|x| {
            let dup = seen.iter().any(|s| s == x || *s == inverse(x));
            seen.push(x.clone());
            !dup
        });
        let mut changed = false;
        'outer: for i in 0..xs.len() {
            for j in 0..xs.len() {
                if i == j {
                    continue;
                }
                for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
                    let x = if a { inverse(&xs[i]) } else { xs[i].clone() };
                    let y = if b { inverse(&xs[j]) } else { xs[j].clone() };
                    let z = product(&x, &y);
                    if z.len() < xs[i].len() {
                        xs[i] = z;
                        changed = true;
                        break 'outer;
                    }
                }
            }
        }
        if !changed {
            return xs;
        }
    }
}

/// Elements of `⟨gens⟩` of length at most `max_len`, found by multiplying
/// out products whose partial products stay within `max_len + slack`.
pub fn subgroup_ball(gens: &[Raw], max_len: usize, slack: usize) -> HashSet<Raw> {
    let steps: Vec<Raw> = gens.iter().flat_map(|g| [g.clone(), inverse(g)]).collect();
    let cap = max_len + slack;
    let mut seen: HashSet<Raw> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(Vec::new());
    queue.push_back(Vec::new());
    while let Some(w) = queue.pop_front() {
        for s in &steps {
            let v = product(&w, s);
            if v.len() <= cap && seen.insert(v.clone()) {
                queue.push_back(v);
            }
        }
    }
    seen.retain(|w| w.len() <= max_len);
    seen
}

/// Permutations of `0..n` as image vectors, in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut used = vec![false; n];
    fn go(n: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                current.push(i);
                go(n, current, used, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    go(n, &mut current, &mut used, &mut out);
    out
}

pub fn invert(p: &[usize]) -> Vec<usize> {
    let mut q = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        q[x] = i;
    }
    q
}

/// Image of a word under an assignment, acting on the right: the point
/// `i` goes to `w(i)` by applying the letters left to right.
pub fn evaluate(images: &[Vec<usize>], w: &[i8], n: usize) -> Vec<usize> {
    let inverses: Vec<Vec<usize>> = images.iter().map(|p| invert(p)).collect();
    (0..n)
        .map(|mut i| {
            for &x in w {
                let k = x.unsigned_abs() as usize - 1;
                i = if x > 0 { images[k][i] } else { inverses[k][i] };
            }
            i
        })
        .collect()
}

pub fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &x)| i == x)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn order(p: &[usize]) -> u64 {
    let mut seen = vec![false; p.len()];
    let mut l = 1u64;
    for s in 0..p.len() {
        let mut len = 0u64;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        if len > 0 {
            l = l / gcd(l, len) * len;
        }
    }
    l
}

/// Every assignment of `gens` permutations of degree `n` killing all the
/// relators, sorted.
pub fn exhaustive_homs(gens: usize, relators: &[Raw], n: usize) -> Vec<Vec<Vec<usize>>> {
    let all = permutations(n);
    let mut out = Vec::new();
    let mut idx = vec![0usize; gens];
    loop {
        let images: Vec<Vec<usize>> = idx.iter().map(|&i| all[i].clone()).collect();
        if relators.iter().all(|r| is_identity(&evaluate(&images, r, n))) {
            out.push(images);
        }
        let mut k = 0;
        loop {
            if k == gens {
                out.sort();
                return out;
            }
            idx[k] += 1;
            if idx[k] < all.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

pub fn presentation_homs(p: &FinitePresentation, n: usize) -> Vec<Vec<Vec<usize>>> {
    let rels: Vec<Raw> = p.relators().iter().map(|r| raw_of(p, r)).collect();
    exhaustive_homs(p.generator_count(), &rels, n)
}

fn gcd_i(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i128>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect())
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * det(&minor)
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors as quotients of consecutive gcds of `k × k` minors.
pub fn invariant_factors_by_minors(m: &[Vec<i64>]) -> Vec<i128> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut prev = 1i128;
    for k in 1..=rows.min(cols) {
        let mut d = 0i128;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<i128>> = rs
                    .iter()
                    .map(|&r| cs.iter().map(|&c| m[r][c] as i128).collect())
                    .collect();
                d = gcd_i(d, det(&minor));
            }
        }
        if d == 0 {
            break;
        }
        out.push(d / prev);
        prev = d;
    }
    out
}

/// Nonzero diagonal entries after integer row and column reduction.
pub fn diagonalize(mut m: Vec<Vec<i128>>) -> Vec<i128> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut k = 0;
    while k < rows.min(cols) {
        let pivot = (k..rows)
            .flat_map(|r| (k..cols).map(move |c| (r, c)))
            .filter(|&(r, c)| m[r][c] != 0)
            .min_by_key(|&(r, c)| m[r][c].abs());
        let Some((r, c)) = pivot else { break };
        m.swap(k, r);
        for row in m.iter_mut() {
            row.swap(k, c);
        }
        let mut clean = true;
        for r in k + 1..rows {
            let q = m[r][k] / m[k][k];
            if q != 0 {
                for c in k..cols {
                    m[r][c] -= q * m[k][c];
                }
            }
            clean &= m[r][k] == 0;
        }
        for c in k + 1..cols {
            let q = m[k][c] / m[k][k];
            if q != 0 {
                for r in k..rows {
                    m[r][c] -= q * m[r][k];
                }
            }
            clean &= m[k][c] == 0;
        }
        if clean {
            diag.push(m[k][k].abs());
            k += 1;
        }
    }
    diag
}

/// Turns a diagonal into a divisibility chain.
pub fn chain(mut d: Vec<i128>) -> Vec<i128> {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = gcd_i(d[i], d[j]);
            let l = d[i] / g * d[j];
            d[i] = g;
            d[j] = l;
        }
    }
    d
}

/// `(betti, torsion)` of the first cellular homology.
pub fn cellular_h1(c: &SquareComplex) -> (usize, Vec<u64>) {
    let (v, e, f) = (c.vertex_count(), c.edge_count(), c.square_count());
    let mut d1 = vec![vec![0i128; e]; v];
    for k in 0..e {
        let d = DirEdge::forward(k);
        d1[c.dst(d)][k] += 1;
        d1[c.src(d)][k] -= 1;
    }
    let mut d2 = vec![vec![0i128; f]; e];
    for (s, boundary) in c.squares().iter().enumerate() {
        for d in boundary {
            d2[d.edge()][s] += if d.is_reversed() { -1 } else { 1 };
        }
    }
    let rank1 = diagonalize(d1).len();
    let factors = chain(diagonalize(d2));
    let betti = e - rank1 - factors.len();
    let torsion = factors.into_iter().filter(|&x| x > 1).map(|x| x as u64).collect();
    (betti, torsion)
}

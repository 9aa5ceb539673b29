//! Words over operator alphabets and the transport machinery: the 2-plane
//! projection ladder, per-block transport between consecutive orthonormal
//! vectors, chained plans, bounded word search, and the word-continuity
//! estimate.
//!
//! A ladder with M lines inside the 2-plane of orthonormal u, v carries u to
//! cos^M(pi/2M) v exactly; the block and chain constructors verify every
//! loss numerically instead of assuming the closed form.

use nalgebra::DMatrix;

use crate::error::{input, precondition};
use crate::linalg;
use crate::subspace::{Subspace, Vector, RANK_TOL};
use crate::{Error, Result};

/// Word over the free semigroup with `m` generators.
///
/// Letters are 1-based and stored in application order: `letters[0]` acts
/// first. The conventional display string lists letters rightmost-first
/// (the last-applied operator is written first), comma-separated.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<usize>,
    m: usize,
}

impl Word {
    /// Empty word; acts as the identity.
    pub fn empty(m: usize) -> Self {
        Word {
            letters: Vec::new(),
            m,
        }
    }

    pub fn new(letters: Vec<usize>, m: usize) -> Result<Self> {
        if letters.iter().any(|&l| l == 0 || l > m) {
            return Err(input(format!("word: letter outside 1..={m}")));
        }
        Ok(Word { letters, m })
    }

    /// Letters in application order (first applied first).
    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn alphabet_size(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of occurrences of the given letter.
    pub fn occurrences(&self, letter: usize) -> usize {
        self.letters.iter().filter(|&&l| l == letter).count()
    }

    /// Composition: apply `first`, then `second`.
    pub fn concat(second: &Word, first: &Word) -> Result<Word> {
        if second.m != first.m {
            return Err(input("word concat: alphabet sizes differ"));
        }
        let mut letters = first.letters.clone();
        letters.extend_from_slice(&second.letters);
        Ok(Word {
            letters,
            m: first.m,
        })
    }

    /// Rightmost-acts-first display: last applied letter written first.
    pub fn display_string(&self) -> String {
        let parts: Vec<String> = self.letters.iter().rev().map(|l| l.to_string()).collect();
        parts.join(",")
    }

    /// Parse the display format (comma-separated, rightmost acts first).
    pub fn from_display_string(s: &str, m: usize) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Word::empty(m));
        }
        let mut letters: Vec<usize> = Vec::new();
        for tok in s.split(',') {
            let l: usize = tok
                .trim()
                .parse()
                .map_err(|e| input(format!("word parse: {e}")))?;
            letters.push(l);
        }
        letters.reverse();
        Word::new(letters, m)
    }
}

/// Evaluate a word on general linear maps (dense matrices), rightmost letter
/// acting first on `x`.
pub fn eval_word(word: &Word, operators: &[DMatrix<f64>], x: &Vector) -> Result<Vector> {
    if operators.len() != word.alphabet_size() {
        return Err(input(format!(
            "eval_word: {} operators for alphabet of {}",
            operators.len(),
            word.alphabet_size()
        )));
    }
    let n = x.len();
    for op in operators {
        if op.nrows() != n || op.ncols() != n {
            return Err(input("eval_word: operator shape mismatch"));
        }
    }
    let mut z = x.clone();
    for &l in word.letters() {
        z = &operators[l - 1] * z;
    }
    Ok(z)
}

/// Evaluate a word on orthogonal projections given by subspaces.
pub fn eval_word_projections(word: &Word, spaces: &[Subspace], x: &Vector) -> Result<Vector> {
    if spaces.len() != word.alphabet_size() {
        return Err(input(format!(
            "eval_word_projections: {} spaces for alphabet of {}",
            spaces.len(),
            word.alphabet_size()
        )));
    }
    for s in spaces {
        if s.ambient_dim() != x.len() {
            return Err(input("eval_word_projections: ambient dim mismatch"));
        }
    }
    let mut z = x.clone();
    for &l in word.letters() {
        z = spaces[l - 1].project_unchecked(&z);
    }
    Ok(z)
}

/// The word as a dense matrix product over the given operators.
pub fn word_matrix(word: &Word, operators: &[DMatrix<f64>]) -> Result<DMatrix<f64>> {
    if operators.len() != word.alphabet_size() {
        return Err(input("word_matrix: operator count mismatch"));
    }
    let n = operators
        .first()
        .map(|m| m.nrows())
        .ok_or_else(|| input("word_matrix: no operators"))?;
    let mut acc = DMatrix::<f64>::identity(n, n);
    for &l in word.letters() {
        acc = &operators[l - 1] * acc;
    }
    Ok(acc)
}

/// Closed-form residual of the M-line ladder: 1 - cos^M(pi / 2M).
pub fn ladder_residual(m: usize) -> f64 {
    assert!(m >= 1);
    1.0 - (std::f64::consts::FRAC_PI_2 / m as f64)
        .cos()
        .powi(m as i32)
}

/// Smallest M whose ladder residual is strictly below `epsilon`.
pub fn minimal_ladder_size(epsilon: f64) -> Result<usize> {
    if epsilon <= 0.0 {
        return Err(input("minimal_ladder_size: epsilon must be positive"));
    }
    let mut m = 1;
    loop {
        if ladder_residual(m) < epsilon {
            return Ok(m);
        }
        m += 1;
        if m > 100_000_000 {
            return Err(Error::ConstructionFailed(
                "minimal_ladder_size: no M below 1e8 reaches the target".into(),
            ));
        }
    }
}

/// Lines and outcome of a 2-plane projection ladder.
#[derive(Clone, Debug)]
pub struct LadderTransport {
    /// Line t spans cos(t pi/2M) u + sin(t pi/2M) v, t = 1..=M.
    pub lines: Vec<Subspace>,
    /// P(l_M) ... P(l_1) u, numerically composed.
    pub result: Vector,
    /// |result - v|.
    pub residual: f64,
}

/// Build the M-line ladder between orthonormal u and v and compose its
/// projections numerically.
pub fn ladder_transport(u: &Vector, v: &Vector, m: usize) -> Result<LadderTransport> {
    if m == 0 {
        return Err(input("ladder_transport: M must be >= 1"));
    }
    if u.len() != v.len() {
        return Err(input("ladder_transport: ambient dims differ"));
    }
    if (u.norm() - 1.0).abs() > 1e-10 || (v.norm() - 1.0).abs() > 1e-10 {
        return Err(input("ladder_transport: u, v must be unit vectors"));
    }
    if u.dot(v).abs() > 1e-10 {
        return Err(input("ladder_transport: u, v must be orthogonal"));
    }
    let mut lines = Vec::with_capacity(m);
    // The iterate never leaves the u-v plane, so the product is composed in
    // plane coordinates with fused operations; at M = 10^4 the plain
    // ambient composition drifts past 1e-12 from sheer step count.
    let mut zu = 1.0f64;
    let mut zv = 0.0f64;
    for t in 1..=m {
        let angle = std::f64::consts::FRAC_PI_2 * t as f64 / m as f64;
        let (sin, cos) = angle.sin_cos();
        let dir = u * cos + v * sin;
        lines.push(Subspace::line(&dir)?);
        let overlap = cos.mul_add(zu, sin * zv);
        zu = cos * overlap;
        zv = sin * overlap;
    }
    let result = u * zu + v * zv;
    let residual = (zu * zu + (zv - 1.0) * (zv - 1.0)).sqrt();
    Ok(LadderTransport {
        lines,
        result,
        residual,
    })
}

/// One transport block: a ladder inside the 2-plane of consecutive chain
/// vectors, with the ladder lines split into an X side (odd rungs, plus both
/// endpoints) and a Y side (even rungs).
#[derive(Clone, Debug)]
pub struct TransportBlock {
    /// 1-based position in the chain.
    pub index: usize,
    /// Block subspace E_i; contains both endpoints.
    pub span: Subspace,
    pub from: Vector,
    pub to: Vector,
    pub epsilon: f64,
    pub ladder_size: usize,
    /// Ladder lines in chain order (line M equals the span of `to`).
    pub lines: Vec<Subspace>,
    /// Word over this block's lines (alphabet 1..=M, rung t = letter t).
    pub word: Word,
    /// Endpoints plus odd rungs.
    pub x_space: Subspace,
    /// Even rungs.
    pub y_space: Subspace,
    /// Measured |word(lines) from - to|; strictly below epsilon.
    pub loss: f64,
}

/// Build one block: choose the minimal ladder meeting `epsilon`, lay its
/// lines inside the 2-plane of `from` and `to`, and verify the loss
/// numerically before returning.
pub fn build_block(
    index: usize,
    span: &Subspace,
    from: &Vector,
    to: &Vector,
    epsilon: f64,
) -> Result<TransportBlock> {
    if epsilon <= 0.0 {
        return Err(input("build_block: epsilon must be positive"));
    }
    if span.distance(from)? > 1e-10 || span.distance(to)? > 1e-10 {
        return Err(input("build_block: endpoints must lie in the block span"));
    }
    if span.dim() < 2 {
        return Err(Error::ConstructionFailed(format!(
            "build_block: block span has dimension {} < 2",
            span.dim()
        )));
    }
    // The measured loss can disagree with the closed form by rounding when
    // epsilon sits exactly on a residual breakpoint, so allow a few deeper
    // ladders before giving up.
    let m_min = minimal_ladder_size(epsilon)?;
    let mut chosen = None;
    for m in m_min..=m_min + 4 {
        let ladder = ladder_transport(from, to, m)?;
        let loss = (&ladder.result - to).norm();
        if loss < epsilon {
            chosen = Some((m, ladder, loss));
            break;
        }
    }
    let (m, ladder, loss) = chosen.ok_or_else(|| {
        Error::ConstructionFailed(format!(
            "build_block: no ladder in {m_min}..={} meets epsilon {epsilon:.6e}",
            m_min + 4
        ))
    })?;
    let mut x_vectors = vec![from.clone(), to.clone()];
    let mut y_vectors = Vec::new();
    for (t, line) in ladder.lines.iter().enumerate() {
        let dir = Vector::from(line.basis().column(0));
        if (t + 1) % 2 == 1 {
            x_vectors.push(dir);
        } else {
            y_vectors.push(dir);
        }
    }
    let x_space = Subspace::span(&x_vectors, RANK_TOL)?;
    let y_space = if y_vectors.is_empty() {
        Subspace::zero(from.len())
    } else {
        Subspace::span(&y_vectors, RANK_TOL)?
    };
    let word = Word::new((1..=m).collect(), m)?;
    Ok(TransportBlock {
        index,
        span: span.clone(),
        from: from.clone(),
        to: to.clone(),
        epsilon,
        ladder_size: m,
        lines: ladder.lines,
        word,
        x_space,
        y_space,
        loss,
    })
}

/// Chained transport: per-block data plus the global space layout and the
/// measured end-to-end loss.
#[derive(Clone, Debug)]
pub struct TransportPlan {
    pub blocks: Vec<TransportBlock>,
    /// Join of the per-block X sides.
    pub x: Subspace,
    /// Join of the odd blocks' Y sides.
    pub y: Subspace,
    /// Span of e_1 joined with the even blocks' Y sides.
    pub z: Subspace,
    /// Global line alphabet: all block lines in chain order.
    pub line_spaces: Vec<Subspace>,
    /// Composite word over `line_spaces`.
    pub composite: Word,
    /// Composite-word step index at the end of each block.
    pub boundary_steps: Vec<usize>,
    /// Running point after each block, starting from e_1.
    pub prefix_points: Vec<Vector>,
    /// |prefix_points[i] - blocks[i].to| for each block.
    pub boundary_losses: Vec<f64>,
    /// |final point - last target|.
    pub total_loss: f64,
    pub sum_epsilon: f64,
}

impl TransportPlan {
    pub fn ambient_dim(&self) -> usize {
        self.blocks[0].from.len()
    }
}

/// Chain verified blocks into a plan. Overlap and orthogonality of the
/// blocks are checked, the composite word is evaluated numerically, and the
/// telescoping bound (total at most the sum of per-block losses) is
/// verified rather than assumed. Errors with CHAIN_DEGRADED when the total
/// measured loss exceeds twice the epsilon budget.
pub fn chain_blocks(blocks: Vec<TransportBlock>, epsilons: &[f64]) -> Result<TransportPlan> {
    if blocks.is_empty() {
        return Err(input("chain_blocks: no blocks"));
    }
    if blocks.len() != epsilons.len() {
        return Err(input("chain_blocks: blocks and epsilons differ in length"));
    }
    let n = blocks[0].from.len();
    for (i, b) in blocks.iter().enumerate() {
        if b.from.len() != n {
            return Err(input("chain_blocks: mixed ambient dims"));
        }
        if b.loss >= epsilons[i] {
            return Err(precondition(format!(
                "chain_blocks: block {} loss {:.3e} >= epsilon {:.3e}",
                b.index, b.loss, epsilons[i]
            )));
        }
    }
    for w in blocks.windows(2) {
        if (&w[0].to - &w[1].from).norm() > 1e-9 {
            return Err(precondition(
                "chain_blocks: consecutive blocks do not share their boundary vector",
            ));
        }
        let overlap = w[0].span.intersect(&w[1].span, RANK_TOL)?;
        if overlap.dim() != 1 || overlap.distance(&w[0].to)? > 1e-8 {
            return Err(precondition(
                "chain_blocks: consecutive spans must overlap in exactly the boundary line",
            ));
        }
    }
    for i in 0..blocks.len() {
        for j in (i + 2)..blocks.len() {
            let cross = blocks[i].span.basis().tr_mul(blocks[j].span.basis());
            if linalg::operator_norm(&cross) > 1e-10 {
                return Err(precondition(format!(
                    "chain_blocks: blocks {} and {} are not orthogonal",
                    blocks[i].index, blocks[j].index
                )));
            }
        }
    }

    let mut x = blocks[0].x_space.clone();
    for b in &blocks[1..] {
        x = x.join(&b.x_space)?;
    }
    let mut y = Subspace::zero(n);
    let mut z = Subspace::line(&blocks[0].from)?;
    for (i, b) in blocks.iter().enumerate() {
        if (i + 1) % 2 == 1 {
            y = y.join(&b.y_space)?;
        } else {
            z = z.join(&b.y_space)?;
        }
    }

    let mut line_spaces = Vec::new();
    let mut letters = Vec::new();
    let mut boundary_steps = Vec::new();
    for b in &blocks {
        let offset = line_spaces.len();
        for &l in b.word.letters() {
            letters.push(offset + l);
        }
        line_spaces.extend(b.lines.iter().cloned());
        boundary_steps.push(letters.len());
    }
    let composite = Word::new(letters, line_spaces.len())?;

    let mut point = blocks[0].from.clone();
    let mut prefix_points = Vec::with_capacity(blocks.len());
    let mut boundary_losses = Vec::with_capacity(blocks.len());
    let mut step = 0;
    for (i, b) in blocks.iter().enumerate() {
        let end = boundary_steps[i];
        while step < end {
            point = line_spaces[composite.letters()[step] - 1].project_unchecked(&point);
            step += 1;
        }
        prefix_points.push(point.clone());
        boundary_losses.push((&point - &b.to).norm());
    }
    let total_loss = *boundary_losses.last().expect("nonempty");

    // Telescoping: the end-to-end loss never exceeds the summed block losses.
    let block_loss_sum: f64 = blocks.iter().map(|b| b.loss).sum();
    if total_loss > block_loss_sum + 1e-9 {
        return Err(Error::ConstructionFailed(format!(
            "chain_blocks: total loss {total_loss:.6e} exceeds telescoped block losses {block_loss_sum:.6e}"
        )));
    }

    let sum_epsilon: f64 = epsilons.iter().sum();
    let bound = 2.0 * sum_epsilon;
    if total_loss > bound {
        return Err(Error::ChainDegraded {
            total: total_loss,
            bound,
            per_block: boundary_losses,
        });
    }

    Ok(TransportPlan {
        blocks,
        x,
        y,
        z,
        line_spaces,
        composite,
        boundary_steps,
        prefix_points,
        boundary_losses,
        total_loss,
        sum_epsilon,
    })
}

/// Build the standard chained plan: ambient dimension n+1 for n blocks,
/// block i moving e_i to e_{i+1} inside their 2-plane.
pub fn build_transport_plan(epsilons: &[f64]) -> Result<TransportPlan> {
    if epsilons.is_empty() {
        return Err(input("build_transport_plan: no epsilons"));
    }
    let n_blocks = epsilons.len();
    let ambient = n_blocks + 1;
    let chain: Vec<Vector> = (0..ambient)
        .map(|i| crate::subspace::basis_vector(ambient, i))
        .collect();
    let mut blocks = Vec::with_capacity(n_blocks);
    for (i, &eps) in epsilons.iter().enumerate() {
        let span = Subspace::span(&[chain[i].clone(), chain[i + 1].clone()], RANK_TOL)?;
        blocks.push(build_block(i + 1, &span, &chain[i], &chain[i + 1], eps)?);
    }
    chain_blocks(blocks, epsilons)
}

/// Per-block targets of the standard divergence demo: 2^-(i+3) for
/// i = 1..=6, so the budget sums below 1/8.
pub fn demo_epsilons() -> Vec<f64> {
    (1..=6).map(|i: i32| 2f64.powi(-i - 3)).collect()
}

/// Default beam width for [`search_word`].
pub const DEFAULT_BEAM: usize = 64;
/// Default length bound for [`search_word`].
pub const DEFAULT_MAX_LEN: usize = 4096;

/// Beam search over three-letter words maximizing the overlap with `v`.
///
/// Letters 1, 2, 3 project onto `x`, `y`, `z`. Returns the first word whose
/// evaluation on `u` lands within `target` of `v`, or None when the length
/// bound is exhausted. Deterministic: candidates are ranked by score with
/// lexicographic tie-breaking on the letters in application order.
#[allow(clippy::too_many_arguments)]
pub fn search_word(
    x: &Subspace,
    y: &Subspace,
    z: &Subspace,
    u: &Vector,
    v: &Vector,
    max_len: usize,
    beam: usize,
    target: f64,
) -> Result<Option<Word>> {
    if max_len == 0 || beam == 0 {
        return Err(input("search_word: max_len and beam must be positive"));
    }
    if (u.norm() - 1.0).abs() > 1e-9 || (v.norm() - 1.0).abs() > 1e-9 {
        return Err(input("search_word: u, v must be unit vectors"));
    }
    let spaces = [x.clone(), y.clone(), z.clone()];
    for s in &spaces {
        if s.ambient_dim() != u.len() {
            return Err(input("search_word: ambient dim mismatch"));
        }
    }
    if (u - v).norm() < target {
        return Ok(Some(Word::empty(3)));
    }
    struct Candidate {
        letters: Vec<usize>,
        point: Vector,
        score: f64,
    }
    let mut front = vec![Candidate {
        letters: Vec::new(),
        point: u.clone(),
        score: u.dot(v),
    }];
    for _len in 1..=max_len {
        let mut next: Vec<Candidate> = Vec::with_capacity(front.len() * 3);
        for cand in &front {
            for letter in 1..=3usize {
                let point = spaces[letter - 1].project_unchecked(&cand.point);
                let mut letters = cand.letters.clone();
                letters.push(letter);
                if (&point - v).norm() < target {
                    return Ok(Some(Word::new(letters, 3)?));
                }
                let score = point.dot(v);
                next.push(Candidate {
                    letters,
                    point,
                    score,
                });
            }
        }
        next.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .unwrap()
                .then_with(|| a.letters.cmp(&b.letters))
        });
        next.truncate(beam);
        front = next;
    }
    Ok(None)
}

/// Outcome of the word-continuity estimate.
#[derive(Clone, Debug)]
pub struct WordContReport {
    /// Operator norm of (word(A) - word(B)) P(E).
    pub lhs: f64,
    /// Sum over letters of occurrence count times |(A_i - B_i) P(E)|.
    pub rhs: f64,
    pub ok: bool,
}

/// Check the continuity of a word in its letters on the range of P(E):
/// |word(A)P(E) - word(B)P(E)| <= sum_i |word_i| |A_i P(E) - B_i P(E)|.
///
/// Preconditions (violations are errors): every operator is a contraction
/// within 1e-12, and each A_i commutes with P(E) within 1e-10.
pub fn wordcont_check(
    psi: &Word,
    a_ops: &[DMatrix<f64>],
    b_ops: &[DMatrix<f64>],
    e: &Subspace,
) -> Result<WordContReport> {
    let m = psi.alphabet_size();
    if a_ops.len() != m || b_ops.len() != m {
        return Err(input("wordcont_check: operator count mismatch"));
    }
    let n = e.ambient_dim();
    for op in a_ops.iter().chain(b_ops.iter()) {
        if op.nrows() != n || op.ncols() != n {
            return Err(input("wordcont_check: operator shape mismatch"));
        }
        if linalg::operator_norm(op) > 1.0 + 1e-12 {
            return Err(precondition(
                "wordcont_check: operator is not a contraction",
            ));
        }
    }
    let pe = e.projector();
    for a in a_ops {
        let comm = a * &pe - &pe * a;
        if linalg::operator_norm(&comm) > 1e-10 {
            return Err(precondition(
                "wordcont_check: A operator does not commute with P(E)",
            ));
        }
    }
    let wa = word_matrix(psi, a_ops)?;
    let wb = word_matrix(psi, b_ops)?;
    let lhs = linalg::operator_norm(&((&wa - &wb) * &pe));
    let mut rhs = 0.0;
    for i in 1..=m {
        let occurrences = psi.occurrences(i) as f64;
        if occurrences > 0.0 {
            rhs += occurrences * linalg::operator_norm(&((&a_ops[i - 1] - &b_ops[i - 1]) * &pe));
        }
    }
    Ok(WordContReport {
        lhs,
        rhs,
        ok: lhs <= rhs + 1e-9,
    })
}

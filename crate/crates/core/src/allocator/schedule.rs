/// Winner-takes-all: `phi[0]` is the virtual user, `phi[m]` and
/// `powers[m - 1]` belong to SU m. An SU wins only with strictly larger φ
/// and positive power, so ties resolve to the virtual user first and then
/// to the lowest index.
pub fn schedule(phi: &[f64], powers: &[f64]) -> usize {
    debug_assert_eq!(phi.len(), powers.len() + 1);
    let mut winner = 0;
    let mut best = phi[0];
    for (m, (&v, &p)) in phi[1..].iter().zip(powers).enumerate() {
        if p > 0.0 && v > best {
            winner = m + 1;
            best = v;
        }
    }
    winner
}

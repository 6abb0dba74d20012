use fogran::figures::{figure, FigureId};
use fogran::Rational;

fn values(fig: &fogran::figures::Figure, label: &str) -> Vec<(Rational, Rational)> {
    fig.column(label).unwrap().into_iter().filter_map(|(m, v)| v.map(|v| (m, v))).collect()
}

#[test]
fn agnostic_curves_fall_with_memory_and_beat_uncoded_placement() {
    for id in [FigureId::SevenA, FigureId::SevenB] {
        let fig = figure(id).unwrap();
        for label in &fig.labels {
            let col = values(&fig, label);
            assert!(!col.is_empty());
            assert!(col.windows(2).all(|w| w[1].1 <= w[0].1), "{id} {label} not monotone");
        }
        let base = fig.column("uncoded_placement").unwrap();
        let best = fig.column("proposed").unwrap();
        for ((m, b), (_, p)) in base.iter().zip(&best) {
            if let Some(b) = b {
                let p = p.as_ref().unwrap_or_else(|| panic!("{id}: proposed undefined at M = {m}"));
                assert!(p <= b, "{id} M = {m}");
            }
        }
        assert_eq!(fig.to_csv(), figure(id).unwrap().to_csv());
    }
}

#[test]
fn proposed_curves_dominate_their_baselines() {
    for id in [FigureId::ThreeA, FigureId::ThreeB, FigureId::FiveA, FigureId::FiveB] {
        let fig = figure(id).unwrap();
        let best = if fig.labels.iter().any(|l| l == "asymmetric") { "asymmetric" } else { "symmetric" };
        let best = fig.column(best).unwrap();
        for label in ["uncoded_placement", "direct_sidelink"] {
            let Some(base) = fig.column(label) else { continue };
            for ((m, b), (_, p)) in base.iter().zip(&best) {
                if let (Some(b), Some(p)) = (b, p) {
                    assert!(p <= b, "{id} {label} M = {m}");
                }
            }
        }
    }
}

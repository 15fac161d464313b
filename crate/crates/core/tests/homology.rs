use proptest::prelude::*;

use strands_decat::arc_diagram::{ArcDiagram, Component, ComponentKind, RawArcDiagram};
use strands_decat::corpus;
use strands_decat::decat::{phi_matrix, wedge_dim};
use strands_decat::gluing::{wedge_module, StandardBasis};

fn relabel(raw: &RawArcDiagram, map: impl Fn(u32) -> u32) -> RawArcDiagram {
    RawArcDiagram {
        components: raw
            .components
            .iter()
            .map(|c| Component { kind: c.kind, points: c.points.iter().map(|&p| map(p)).collect() })
            .collect(),
        matching: raw.matching.iter().map(|&[a, b]| [map(a), map(b)]).collect(),
    }
}

#[test]
fn homology_rank_matches_the_traced_surface() {
    for (name, d) in corpus::diagrams() {
        assert_eq!(d.homology_basis().len(), d.surface_type().h1_rank(), "{name}");
    }
}

#[test]
fn wedge_modules_of_traced_surfaces_have_the_decat_dimension() {
    for (name, d) in corpus::diagrams() {
        let s = d.surface_type();
        let m = wedge_module(&s, &StandardBasis::default_for(&s).unwrap()).unwrap();
        assert_eq!(m.dim, wedge_dim(&d), "{name}");
    }
}

#[test]
fn reversing_point_ids_changes_nothing_intrinsic() {
    for (name, d) in corpus::diagrams() {
        let raw = d.to_raw();
        let top = raw.components.iter().flat_map(|c| c.points.iter()).copied().max().unwrap();
        let e = ArcDiagram::try_from(relabel(&raw, |p| top + 1 - p)).unwrap();
        assert_eq!(e.surface_type(), d.surface_type(), "{name}");
        for i in d.intervals() {
            assert_eq!(phi_matrix(&e, i).unwrap().rank(), phi_matrix(&d, i).unwrap().rank(), "{name}");
        }
    }
}

fn diagram() -> impl Strategy<Value = RawArcDiagram> {
    (1usize..=4)
        .prop_flat_map(|pairs| {
            let n = 2 * pairs as u32;
            (
                Just((1..=n).collect::<Vec<_>>()).prop_shuffle(),
                Just((1..=n).collect::<Vec<_>>()).prop_shuffle(),
                prop::collection::vec(any::<bool>(), n as usize),
                prop::collection::vec(any::<bool>(), n as usize),
            )
        })
        .prop_map(|(order, matching, cuts, circles)| {
            let mut components = vec![Component { kind: ComponentKind::Interval, points: Vec::new() }];
            for (i, &p) in order.iter().enumerate() {
                if i > 0 && cuts[i] {
                    let kind = if circles[i] { ComponentKind::Circle } else { ComponentKind::Interval };
                    components.push(Component { kind, points: Vec::new() });
                }
                components.last_mut().unwrap().points.push(p);
            }
            RawArcDiagram { components, matching: matching.chunks(2).map(|c| [c[0], c[1]]).collect() }
        })
}

proptest! {
    #[test]
    fn random_diagrams_trace_to_the_right_rank(raw in diagram(), shift in 1u32..50) {
        let d = ArcDiagram::try_from(raw.clone()).unwrap();
        let s = d.surface_type();
        prop_assert_eq!(d.homology_basis().len(), s.h1_rank());
        let e = ArcDiagram::try_from(relabel(&raw, |p| p + shift)).unwrap();
        prop_assert_eq!(e.surface_type(), s);
    }
}

use gqft::corpus::{random_cobordism, random_tree, rng, split_corpus};
use gqft::gaussian::{relative_data, route_residual};
use gqft::gluing::{
    compose, glue_gaussian, gluing_check, self_glue_dn, trace_formula_check, CobordismData,
};
use gqft::graph::{BoundaryMarking, GluingSpec, Graph};
use gqft::linalg::{factorize, relative_deviation};

#[test]
fn split_corpus_glues_exactly() {
    for (k, spec) in split_corpus(2024, 200, 12, 3).iter().enumerate() {
        for m2 in [0.3, 1.0, 3.0] {
            let rep = gluing_check(spec, m2).unwrap();
            assert!(rep.propagator.residual < 1e-9, "split {k} m2 {m2}: {rep:?}");
            assert!(
                rep.determinant.residual < 1e-9,
                "split {k} m2 {m2}: {rep:?}"
            );
        }
    }
}

#[test]
fn total_dn_is_symmetric_positive_definite() {
    for spec in split_corpus(5, 50, 12, 3) {
        let gd = glue_gaussian(&spec, 0.3).unwrap();
        assert_eq!(gd.total_dn, gd.total_dn.transpose());
        assert!(factorize(&gd.total_dn).unwrap().is_positive_definite());
    }
}

#[test]
fn trees_glued_at_a_leaf() {
    let mut r = rng(17);
    for _ in 0..20 {
        let left = random_tree(&mut r, 6);
        let right = random_tree(&mut r, 5);
        let leaf = |g: &Graph| (0..g.n()).find(|&v| g.degree(v) == 1).unwrap();
        let (a, b) = (leaf(&left), leaf(&right));
        let mut right_ids: Vec<String> =
            right.vertex_ids().iter().map(|s| format!("r{s}")).collect();
        right_ids.sort();
        let right = Graph::from_indexed(right_ids, right.edges()).unwrap();
        let spec = GluingSpec {
            left_boundary: BoundaryMarking::vertices_only(&left, [left.id(a)]).unwrap(),
            right_boundary: BoundaryMarking::vertices_only(&right, [right.id(b)]).unwrap(),
            identification: vec![(left.id(a).to_string(), right.id(b).to_string())],
            left,
            right,
        };
        let rep = gluing_check(&spec, 0.7).unwrap();
        assert!(rep.propagator.residual < 1e-9);
        assert!(rep.determinant.residual < 1e-9);
    }
}

fn ids(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

#[test]
fn composition_matches_direct_and_is_associative() {
    let mut r = rng(99);
    for trial in 0..10 {
        let m2 = [0.3, 1.0, 3.0][trial % 3];
        let (y1, y2, y3, y4) = (ids("p", 1), ids("q", 2), ids("s", 2), ids("t", 1));
        let a = CobordismData::new(random_cobordism(&mut r, &y1, &y2, "a", 3), m2).unwrap();
        let b = CobordismData::new(random_cobordism(&mut r, &y2, &y3, "b", 2), m2).unwrap();
        let c = CobordismData::new(random_cobordism(&mut r, &y3, &y4, "c", 3), m2).unwrap();
        let same = |y: &[String]| y.iter().map(|s| (s.clone(), s.clone())).collect::<Vec<_>>();
        let ab = compose(&a, &b, &same(&y2)).unwrap();
        let direct = relative_data(&ab.cobordism.graph, &ab.cobordism.boundary(), m2).unwrap();
        assert!(route_residual(&ab.data, &direct) < 1e-9, "trial {trial}");
        let left = compose(&ab, &c, &same(&y3)).unwrap();
        let bc = compose(&b, &c, &same(&y3)).unwrap();
        let right = compose(&a, &bc, &same(&y2)).unwrap();
        assert_eq!(left.cobordism.graph, right.cobordism.graph);
        assert!(relative_deviation(&left.data.dn, &right.data.dn) < 1e-9);
        assert!(relative_deviation(&left.data.ext, &right.data.ext) < 1e-9);
        assert!(relative_deviation(&left.data.propagator, &right.data.propagator) < 1e-9);
        assert!((left.data.det / right.data.det - 1.0).abs() < 1e-9);
    }
}

#[test]
fn self_gluing_leaf_pairs() {
    let mut r = rng(41);
    for _ in 0..10 {
        let core = random_tree(&mut r, 5);
        let mut vertices: Vec<String> = core.vertex_ids().to_vec();
        let mut edges: Vec<(String, String)> = core
            .edges()
            .iter()
            .map(|&(a, b)| (core.id(a).into(), core.id(b).into()))
            .collect();
        for (leaf, anchor) in [("la", 0), ("lb", 1), ("ma", 3), ("mb", 4)] {
            vertices.push(leaf.into());
            edges.push((leaf.into(), core.id(anchor).into()));
        }
        let g = Graph::new(vertices, edges).unwrap();
        let y1 = BoundaryMarking::vertices_only(&g, ["la", "lb"]).unwrap();
        let y2 = BoundaryMarking::vertices_only(&g, ["ma", "mb"]).unwrap();
        let f = vec![
            ("la".to_string(), "ma".to_string()),
            ("lb".to_string(), "mb".to_string()),
        ];
        assert!(self_glue_dn(&g, &y1, &y2, &f, 0.8).unwrap().residual < 1e-10);
        assert!(
            trace_formula_check(&g, &y1, &y2, &f, 0.8, 1.0)
                .unwrap()
                .residual
                < 1e-9
        );
    }
}

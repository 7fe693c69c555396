mod common;

use common::corpus_files;
use lpopt_core::decompose::{check_safety, decompose_program, Options};
use lpopt_core::oracle;
use lpopt_core::parser::{parse, render};
use lpopt_core::rulegraph;
use lpopt_core::treedecomp::Heuristic;

#[test]
fn corpus_is_present() {
    assert!(corpus_files().len() >= 8);
}

#[test]
fn render_round_trips() {
    for (name, src) in corpus_files() {
        let p = parse(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
        let text = render(&p);
        assert_eq!(parse(&text).unwrap(), p, "{name}");
        assert_eq!(render(&parse(&text).unwrap()), text, "{name}");
    }
}

#[test]
fn decomposition_is_equivalent_and_safe() {
    for (name, src) in corpus_files() {
        let p = parse(&src).unwrap();
        for h in Heuristic::ALL {
            for include_head_clique in [true, false] {
                let opts = Options { heuristic: h, include_head_clique, ..Options::default() };
                let (out, _) = decompose_program(&p, &opts).unwrap();
                for r in &out.rules {
                    assert!(check_safety(r).is_empty(), "{name}: {r}");
                }
                let reparsed = parse(&render(&out)).unwrap();
                assert_eq!(reparsed, out, "{name}");
                assert!(oracle::equivalent(&p, &out).unwrap(), "{name} with {h}");
            }
        }
    }
}

#[test]
fn cliques_file_is_unchanged() {
    let (_, src) = corpus_files().into_iter().find(|(n, _)| n == "cliques.lp").unwrap();
    let p = parse(&src).unwrap();
    for r in p.rules.iter().filter(|r| !r.is_fact()) {
        assert!(rulegraph::build(r, true).is_complete(), "{r}");
    }
    let (out, rep) = decompose_program(&p, &Options::default()).unwrap();
    assert_eq!(out, p);
    assert!(rep.rules.iter().all(|r| r.rules_emitted == 1));
}

#[test]
fn cousins_answer() {
    let (_, src) = corpus_files().into_iter().find(|(n, _)| n == "cousins.lp").unwrap();
    let p = parse(&src).unwrap();
    let (out, rep) = decompose_program(&p, &Options::default()).unwrap();
    assert!(rep.max_width < 7);
    let models = oracle::answer_sets(&out).unwrap();
    assert_eq!(models.len(), 1);
    let cousins: Vec<String> = models[0]
        .iter()
        .filter(|a| a.predicate == "uptosecondcousin")
        .map(|a| a.to_string())
        .collect();
    assert!(cousins.contains(&"uptosecondcousin(ann,fay)".to_string()), "{cousins:?}");
}

use proptest::prelude::*;
use srclab::frontend::catalog::{all_builtins, HEISENBERG1};
use srclab::frontend::{parse_document, parse_manifold, serialize_manifold};
use srclab::Error;

#[test]
fn catalog_round_trips_twice() {
    for e in all_builtins() {
        let once = serialize_manifold(&e.spec);
        let back = parse_manifold(&once).unwrap();
        assert_eq!(back, e.spec, "{}", e.name);
        assert_eq!(serialize_manifold(&back), once, "{}", e.name);
    }
}

#[test]
fn declaration_locations() {
    let doc = parse_document(HEISENBERG1).unwrap();
    let (line, _) = doc.location("X1").unwrap();
    assert!(HEISENBERG1.lines().nth(line - 1).unwrap().trim_start().starts_with("X1"));
}

#[test]
fn validation_errors_name_a_line() {
    let text = HEISENBERG1.replace("hdim 2", "hdim 3");
    match parse_manifold(&text) {
        Err(Error::Validation { line, .. }) => assert!(line > 0),
        other => panic!("{other:?}"),
    }
}

fn located(e: &Error) -> bool {
    match e {
        Error::Parse { line, column, .. } => *line > 0 && *column > 0,
        Error::Validation { line, .. } => *line > 0,
        _ => false,
    }
}

proptest! {
    #[test]
    fn arbitrary_text_never_panics(text in "\\PC{0,200}") {
        if let Err(e) = parse_manifold(&text) {
            prop_assert!(located(&e), "{e:?}");
        }
    }

    #[test]
    fn mutated_catalog_text_never_panics(pos in 0usize..400, junk in "[-+*/^()=,# a-z0-9.\\n]{1,6}") {
        let base = HEISENBERG1;
        let cut = base.char_indices().map(|(i, _)| i).nth(pos % base.chars().count()).unwrap();
        let text = format!("{}{}{}", &base[..cut], junk, &base[cut..]);
        if let Err(e) = parse_manifold(&text) {
            prop_assert!(located(&e), "{e:?}\n{text}");
        }
    }
}

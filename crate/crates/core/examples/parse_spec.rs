//! Parse a spec, print where things were declared, serialize it back, and
//! show a located error.

use srclab::frontend::{parse_document, serialize_manifold};

const TEXT: &str = "\
# Heisenberg group
manifold H1
dim 3
hdim 2
coords x y z
hframe
  X1 = dx - (y/2) dz
  X2 = dy + (x/2) dz
vframe
  Z = dz
metric identity
oneform 1, x^2
";

fn main() {
    let doc = parse_document(TEXT).expect("valid spec");
    for name in ["X1", "X2", "Z", "metric", "oneform"] {
        println!("{name:<8} declared at {:?}", doc.location(name));
    }
    print!("{}", serialize_manifold(&doc.spec));

    let broken = TEXT.replace("(y/2)", "(y/*2)");
    match parse_document(&broken) {
        Ok(_) => println!("unexpectedly parsed"),
        Err(e) => println!("error: {e}"),
    }
}

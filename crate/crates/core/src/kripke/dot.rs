use std::fmt::Write;

use super::PointedModel;

/// Renders a pointed model as a Graphviz digraph. Each node lists the atoms
/// true there; the root is drawn with a double border.
pub fn to_dot(pm: &PointedModel) -> String {
    let frame = pm.frame();
    let mut out = String::from("digraph model {\n  rankdir=LR;\n");
    for w in 0..frame.len() {
        let atoms: Vec<&str> = pm
            .model()
            .valuation()
            .iter()
            .filter(|(_, set)| set.contains(w))
            .map(|(p, _)| p.as_str())
            .collect();
        let shape = if w == pm.root() { "doublecircle" } else { "circle" };
        let _ = writeln!(
            out,
            "  \"{}\" [shape={shape}, label=\"{}\\n{{{}}}\"];",
            escape(frame.name(w)),
            escape(frame.name(w)),
            atoms.join(",")
        );
    }
    for (a, b) in frame.rel().pairs() {
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\";",
            escape(frame.name(a)),
            escape(frame.name(b))
        );
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_nodes_and_edges() {
        let pm = PointedModel::from_json(
            r#"{"worlds":["s","a"],"root":"s","edges":[["s","a"]],"valuation":{"p":["a"]}}"#,
        )
        .unwrap();
        let dot = to_dot(&pm);
        assert!(dot.starts_with("digraph model {"));
        assert!(dot.contains("\"s\" [shape=doublecircle"));
        assert!(dot.contains("label=\"a\\n{p}\""));
        assert!(dot.contains("\"s\" -> \"a\";"));
    }
}

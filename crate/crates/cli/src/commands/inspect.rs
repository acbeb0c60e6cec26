//! `inspect-graph`: show what a program graph is made of.

use std::path::PathBuf;

use clap::Args;

use loglevel_core::graph::{read_graph, validate_graph, write_graph};
use loglevel_core::{CoreError, EdgeType, NodeType, ProgramGraph, Result};

#[derive(Debug, Args)]
pub struct InspectArgs {
    /// A .java source (converted on the fly) or a .json graph file.
    pub path: PathBuf,
    /// Also list every node and edge.
    #[arg(long)]
    pub full: bool,
    /// Write the graph back out as canonical JSON.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

pub fn run(args: &InspectArgs) -> Result<()> {
    let ext = args.path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let graph = match ext {
        "java" => {
            let source = std::fs::read_to_string(&args.path)
                .map_err(|e| CoreError::io(&args.path, e))?;
            let file = args.path.display().to_string();
            let project = args
                .path
                .parent()
                .and_then(|p| p.file_name())
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "input".to_string());
            loglevel_core::java::file_to_graph(&file, &project, &source)?.graph
        }
        "json" => {
            let graph = read_graph(&args.path)?;
            let violations = validate_graph(&graph);
            if !violations.is_empty() {
                for v in &violations {
                    eprintln!("invariant violated: {v}");
                }
                return Err(CoreError::Data(format!(
                    "{}: graph fails {} invariant check(s)",
                    args.path.display(),
                    violations.len()
                )));
            }
            graph
        }
        _ => {
            return Err(CoreError::Config(format!(
                "{}: expected a .java or .json input",
                args.path.display()
            )))
        }
    };

    print_composition(&graph);
    if args.full {
        print_full(&graph);
    }
    if let Some(out) = &args.out {
        super::create_parent_dirs(out)?;
        write_graph(out, &graph)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn print_composition(g: &ProgramGraph) {
    println!("file    {}", g.file_path);
    println!("project {}", g.project);
    println!("{} nodes:", g.node_count());
    for nt in NodeType::ALL {
        let count = g.nodes.iter().filter(|n| n.node_type == nt).count();
        if count > 0 {
            println!("  {:<18} {count}", nt.wire_name());
        }
    }
    println!("{} edges:", g.edge_count());
    for et in EdgeType::ALL {
        let count = g.edges.iter().filter(|e| e.etype == et).count();
        if count > 0 {
            println!("  {:<18} {count}", et.wire_name());
        }
    }
}

fn print_full(g: &ProgramGraph) {
    println!("nodes:");
    for n in &g.nodes {
        let span = match n.span {
            Some((s, e)) => format!(" @{s}-{e}"),
            None => String::new(),
        };
        let text = if n.text.is_empty() {
            String::new()
        } else {
            format!(" {:?}", n.text)
        };
        println!("  {:>4} {}{}{}", n.id, n.node_type.wire_name(), text, span);
    }
    println!("edges:");
    for e in &g.edges {
        println!("  {:>4} -{}-> {}", e.src, e.etype.wire_name(), e.dst);
    }
}

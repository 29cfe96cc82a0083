use serde::Deserialize;

#[derive(Deserialize)]
struct Notebook {
    cells: Vec<Cell>,
}

#[derive(Deserialize)]
struct Cell {
    cell_type: String,
    #[serde(default)]
    source: CellSource,
}

#[derive(Deserialize, Default)]
#[serde(untagged)]
enum CellSource {
    Lines(Vec<String>),
    Text(String),
    #[default]
    Empty,
}

/// Concatenates the code cells of a v4 notebook into one Python module.
///
/// Each cell is preceded by a `# %% [cell N]` marker comment. IPython magics
/// and shell escapes (`%`, `%%`, `!`) are commented out so they parse.
pub fn notebook_to_python(json: &str) -> Result<String, String> {
    let nb: Notebook = serde_json::from_str(json).map_err(|e| e.to_string())?;
    let mut out = String::new();
    for (i, cell) in nb.cells.iter().enumerate() {
        if cell.cell_type != "code" {
            continue;
        }
        let text = match &cell.source {
            CellSource::Lines(lines) => lines.concat(),
            CellSource::Text(t) => t.clone(),
            CellSource::Empty => String::new(),
        };
        out.push_str(&format!("# %% [cell {i}]\n"));
        let mut in_cell_magic = false;
        for line in text.lines() {
            let t = line.trim_start();
            if t.starts_with("%%") {
                in_cell_magic = true;
            }
            if in_cell_magic || t.starts_with('%') || t.starts_with('!') {
                out.push_str("# ");
            }
            out.push_str(line);
            out.push('\n');
        }
    }
    Ok(out)
}

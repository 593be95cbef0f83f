//! Text layout of an alignment: one line per row, with `|` connectors
//! between the symbols of each column.

use super::Alignment;

pub fn render_alignment(a: &Alignment) -> String {
    let nrows = a.rows.len();
    let label_width = (nrows - 1).to_string().len();
    let widths: Vec<usize> = (0..a.columns.len())
        .map(|c| a.column_mark(c).chars().count())
        .collect();
    let spans: Vec<(usize, usize)> = a
        .columns
        .iter()
        .map(|col| (col[0].0, col[col.len() - 1].0))
        .collect();
    let mut cell_at = vec![vec![None; a.columns.len()]; nrows];
    for (c, col) in a.columns.iter().enumerate() {
        for &(r, p) in col.iter() {
            cell_at[r][c] = Some(p);
        }
    }
    let line = |body: Vec<String>, label: Option<usize>| -> String {
        let mut s = match label {
            Some(r) => format!("{r:>label_width$} "),
            None => " ".repeat(label_width + 1),
        };
        s.push_str(&body.join(" "));
        if let Some(r) = label {
            s.push(' ');
            s.push_str(&r.to_string());
        }
        s
    };
    let mut out = Vec::new();
    for (r, cells) in cell_at.iter().enumerate() {
        let body = (0..a.columns.len())
            .map(|c| {
                let text = match cells[c] {
                    Some(p) => a.rows[r].symbols[p].mark.clone(),
                    None if spans[c].0 < r && r < spans[c].1 => "|".to_string(),
                    None => String::new(),
                };
                format!("{text:<w$}", w = widths[c])
            })
            .collect();
        out.push(line(body, Some(r)));
        if r + 1 < nrows {
            let body = (0..a.columns.len())
                .map(|c| {
                    let text = if spans[c].0 <= r && r < spans[c].1 { "|" } else { "" };
                    format!("{text:<w$}", w = widths[c])
                })
                .collect();
            out.push(line(body, None));
        }
    }
    let mut text: String = out
        .iter()
        .map(|l| l.trim_end().to_string())
        .collect::<Vec<_>>()
        .join("\n");
    text.push('\n');
    text
}

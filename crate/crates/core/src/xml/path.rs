use super::{is_valid_name, Element, XmlDocument};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed path `{path}`: {reason}")]
pub struct PathError {
    pub path: String,
    pub reason: String,
}

struct Step<'p> {
    name: &'p str,
    /// 1-based position among same-named siblings.
    index: Option<usize>,
}

fn parse_path(path: &str) -> Result<Vec<Step<'_>>, PathError> {
    let fail = |reason: &str| PathError {
        path: path.to_owned(),
        reason: reason.to_owned(),
    };
    if path.is_empty() {
        return Err(fail("empty path"));
    }
    path.split('/')
        .map(|seg| {
            let (name, index) = match seg.find('[') {
                None => (seg, None),
                Some(open) => {
                    let digits = seg[open + 1..]
                        .strip_suffix(']')
                        .ok_or_else(|| fail("unclosed `[`"))?;
                    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                        return Err(fail("index must be a positive integer"));
                    }
                    let i: usize = digits.parse().map_err(|_| fail("index out of range"))?;
                    if i == 0 {
                        return Err(fail("indices are 1-based"));
                    }
                    (&seg[..open], Some(i))
                }
            };
            if !is_valid_name(name) {
                return Err(fail(&format!("`{seg}` is not a valid step")));
            }
            Ok(Step { name, index })
        })
        .collect()
}

/// Selects elements by a slash-separated path such as
/// `quizbank/question[2]/text`. The first step names the root element. A step
/// without an index matches every same-named child; `[i]` picks the i-th.
pub fn select_path<'d>(doc: &'d XmlDocument, path: &str) -> Result<Vec<&'d Element>, PathError> {
    let steps = parse_path(path)?;
    let (first, rest) = steps.split_first().expect("parse_path never returns empty");
    let mut current: Vec<&Element> = if doc.root.name == first.name && first.index.unwrap_or(1) == 1
    {
        vec![&doc.root]
    } else {
        Vec::new()
    };
    for step in rest {
        current = current
            .into_iter()
            .flat_map(|e| {
                let matches = e.elements_named(step.name);
                match step.index {
                    Some(i) => matches.skip(i - 1).take(1).collect::<Vec<_>>(),
                    None => matches.collect(),
                }
            })
            .collect();
    }
    Ok(current)
}

use crate::error::{Error, Result};

/// Space-joined n-grams of `tokens`, in order. Never spans beyond the slice,
/// so callers pass one comment at a time.
pub fn extract_ngrams<S: AsRef<str>>(tokens: &[S], n: usize) -> Result<Vec<String>> {
    if n == 0 {
        return Err(Error::invalid("n-gram order must be at least 1"));
    }
    Ok(tokens
        .windows(n)
        .map(|w| {
            let mut s = String::with_capacity(w.iter().map(|t| t.as_ref().len() + 1).sum());
            for (i, t) in w.iter().enumerate() {
                if i > 0 {
                    s.push(' ');
                }
                s.push_str(t.as_ref());
            }
            s
        })
        .collect())
}

/// Calls `f` with each n-gram of `tokens`, reusing one buffer.
pub(crate) fn for_each_ngram<S: AsRef<str>>(
    tokens: &[S],
    n: usize,
    buf: &mut String,
    mut f: impl FnMut(&str),
) {
    if n == 0 {
        return;
    }
    for w in tokens.windows(n) {
        buf.clear();
        for (i, t) in w.iter().enumerate() {
            if i > 0 {
                buf.push(' ');
            }
            buf.push_str(t.as_ref());
        }
        f(buf);
    }
}

'''
Parsers
'''

import re

EDGE_RE = re.compile(r'^([0-9]+)\s+([0-9]+)(?:\s+(\S+))?$')
CONFIG_RE = re.compile(r'^([A-Za-z_][\w.]*)\s*=\s*(.*)$')
LABEL_RE = re.compile(r'^[0-9]+$')

# labels must fit a signed 64-bit node id
MAX_LABEL = 2 ** 63 - 1

def strip_comment(line):
    ''' Drop a trailing '#' comment and surrounding whitespace '''
    return line.split('#', 1)[0].strip()

def _label(text, lineno):
    value = int(text)
    if value > MAX_LABEL:
        raise RuntimeError(
            "Label out of range on line {lineno}: {t}".format(lineno=lineno, t=text)
        )
    return value

def parse_edge_lines(lines):
    ''' Parse edge-list lines

    Each non-comment line is "u v" or "u v p", whitespace separated, with
    non-negative integer labels. '#' starts a comment; blank lines are
    skipped.

    Parameters
    ----------
    lines : iterable of strings

    Returns
    -------
    List(tuple(int, int, float or None, int)) of (u, v, p, line number)

    Raises
    ------
    RuntimeError if a line is malformed, a label exceeds 2^63 - 1, or a
    probability is outside [0, 1]

    Examples
    --------
    >>> parse_edge_lines(['# comment', '0 1', '1 2 0.5'])
    [(0, 1, None, 2), (1, 2, 0.5, 3)]
    '''
    edges = []
    for lineno, line in enumerate(lines, start=1):
        text = strip_comment(line)
        if not text:
            continue
        match = EDGE_RE.match(text)
        if match is None:
            raise RuntimeError(
                "Malformed edge on line {lineno}: {line!r}".format(lineno=lineno, line=text)
            )
        src, dst, prob_txt = match.groups()
        prob = None
        if prob_txt is not None:
            try:
                prob = float(prob_txt)
            except ValueError:
                raise RuntimeError(
                    "Malformed probability on line {lineno}: {p!r}".format(
                        lineno=lineno, p=prob_txt
                    )
                )
            if not 0.0 <= prob <= 1.0:
                raise RuntimeError(
                    "Probability outside [0, 1] on line {lineno}: {p}".format(
                        lineno=lineno, p=prob_txt
                    )
                )
        edges.append((_label(src, lineno), _label(dst, lineno), prob, lineno))
    return edges

def parse_config_lines(lines):
    ''' Parse flat key=value configuration lines

    Parameters
    ----------
    lines : iterable of strings

    Returns
    -------
    Dictionary of key -> (value string, line number)

    Raises
    ------
    RuntimeError if a line is not key=value or a key repeats

    Examples
    --------
    >>> parse_config_lines(['# sweep', 'k = 1,5  # budgets', '', 'seed=3'])
    {'k': ('1,5', 2), 'seed': ('3', 4)}
    '''
    config = {}
    for lineno, line in enumerate(lines, start=1):
        text = strip_comment(line)
        if not text:
            continue
        match = CONFIG_RE.match(text)
        if match is None:
            raise RuntimeError(
                "Expected key = value on line {lineno}: {line!r}".format(
                    lineno=lineno, line=text
                )
            )
        key, value = match.group(1), match.group(2).strip()
        if key in config:
            raise RuntimeError(
                "Duplicate key {key!r} on line {lineno} (first on line {first})".format(
                    key=key, lineno=lineno, first=config[key][1]
                )
            )
        config[key] = (value, lineno)
    return config

def parse_int_list(text):
    ''' Parse "1,5,10", "1..20" or a mix of both into a list of ints

    Raises
    ------
    ValueError on malformed items

    Examples
    --------
    >>> parse_int_list('1..3,10')
    [1, 2, 3, 10]
    >>> parse_int_list('10k, 20k')
    [10000, 20000]
    '''
    values = []
    for item in text.split(','):
        item = item.strip()
        if not item:
            continue
        if '..' in item:
            lo, hi = item.split('..', 1)
            values.extend(range(parse_count(lo), parse_count(hi) + 1))
        else:
            values.append(parse_count(item))
    if not values:
        raise ValueError("Empty integer list: {t!r}".format(t=text))
    return values

def parse_count(text):
    ''' Parse an int with an optional k/M suffix ("250k" -> 250000) '''
    text = text.strip()
    scale = 1
    if text[-1:] in ('k', 'K'):
        scale, text = 1000, text[:-1]
    elif text[-1:] == 'M':
        scale, text = 1000000, text[:-1]
    try:
        return int(text) * scale
    except ValueError:
        raise ValueError("Not an integer: {t!r}".format(t=text))

def parse_names(text):
    ''' Parse a comma separated list of lowercase names

    Examples
    --------
    >>> parse_names('RBR, proximity,,random')
    ['rbr', 'proximity', 'random']
    '''
    return [name.strip().lower() for name in text.split(',') if name.strip()]

def parse_label_lines(lines):
    ''' Parse node labels, whitespace or comma separated, '#' comments allowed

    Raises
    ------
    RuntimeError if a token is not a non-negative integer below 2^63

    Examples
    --------
    >>> parse_label_lines(['# seeds', '3 7', '12,4'])
    [3, 7, 12, 4]
    '''
    labels = []
    for lineno, line in enumerate(lines, start=1):
        for token in re.split(r'[\s,]+', strip_comment(line)):
            if not token:
                continue
            if not LABEL_RE.match(token):
                raise RuntimeError(
                    "Malformed node label on line {lineno}: {t!r}".format(
                        lineno=lineno, t=token
                    )
                )
            labels.append(_label(token, lineno))
    return labels

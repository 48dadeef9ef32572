import strcase


def column_name(label):
    return strcase.to_snake(label)


def slug(label):
    return strcase.to_kebab(label)


def header(labels, width):
    return "|".join(pad(column_name(l), width) for l in labels)


def pad(text, width, fill=" "):
    """Centre text in a field of the given width."""
    if len(fill) != 1:
        raise ValueError("fill must be one character")
    if width <= len(text):
        return text
    missing = width - len(text)
    left = missing // 2
    right = missing - left
    return fill * left + text + fill * right

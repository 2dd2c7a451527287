/** Tiny DOM construction helper. */
export const el = (tag, attrs = {}, ...children) => {
    const node = document.createElement(tag);
    for (const [name, value] of Object.entries(attrs)) {
        if (typeof value === 'function') {
            node.addEventListener(name.replace(/^on/, ''), value);
        }
        else if (name === 'class') {
            node.className = value;
        }
        else {
            node.setAttribute(name, value);
        }
    }
    for (const child of children) {
        if (child === null || child === undefined)
            continue;
        node.append(child instanceof Node ? child : document.createTextNode(child));
    }
    return node;
};
export const clear = (node) => {
    while (node.firstChild)
        node.removeChild(node.firstChild);
};

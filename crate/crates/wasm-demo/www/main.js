import init, { Demo } from './pkg/abtree_wasm_demo.js';

const MAX_PER_LEVEL = 64;
const $ = (id) => document.getElementById(id);
let demo;

function levels(layout) {
  const out = [];
  let row = layout ? [layout] : [];
  while (row.length) {
    out.push(row);
    row = row.flatMap((n) => (n.kind === 'internal' ? n.children : []));
  }
  return out;
}

function drawTree(el, title, name, view) {
  title.textContent = `${name}: ${view.len} keys, rank ${view.rank}`;
  el.replaceChildren();
  for (const row of levels(view.layout)) {
    const div = document.createElement('div');
    div.className = 'level';
    for (const n of row.slice(0, MAX_PER_LEVEL)) {
      const box = document.createElement('span');
      box.className = n.kind === 'leaf' ? 'node leaf' : 'node';
      box.textContent = n.keys.join(' ');
      div.append(box);
    }
    if (row.length > MAX_PER_LEVEL) {
      const more = document.createElement('span');
      more.className = 'more';
      more.textContent = `+${row.length - MAX_PER_LEVEL} more`;
      div.append(more);
    }
    el.append(div);
  }
}

function show(json) {
  const v = JSON.parse(json);
  drawTree($('tree-a'), $('title-a'), 'A', v.a);
  drawTree($('tree-b'), $('title-b'), 'B', v.b);
  $('status').className = '';
  $('status').textContent = v.message;
  const c = v.counters;
  $('counters').textContent =
    `visited ${c.visited}, node splits ${c.node_splits}, fuses ${c.fuses}, ` +
    `join descents ${c.join_descent}, degree-b splits ${c.degree_b_splits}`;
}

function run(f) {
  try {
    show(f());
  } catch (e) {
    $('status').className = 'error';
    $('status').textContent = e.message ?? String(e);
  }
}

function reset() {
  run(() => {
    demo?.free();
    demo = new Demo(Number($('deg-a').value), Number($('deg-b').value));
    demo.load('a', $('keys-a').value);
    return demo.load('b', $('keys-b').value);
  });
}

await init();
reset();
$('reset').onclick = reset;
for (const btn of document.querySelectorAll('[data-load]')) {
  const which = btn.dataset.load;
  btn.onclick = () => run(() => demo.load(which, $(`keys-${which}`).value));
}
$('bulk').onclick = () => run(() => demo.bulk($('bulk-tree').value, $('bulk-ins').value, $('bulk-del').value));
$('split').onclick = () => run(() => demo.split(Number($('split-key').value)));
$('setop').onclick = () => run(() => demo.set_op($('op').value));

//! Shared example snippets used across tests, benches, and docs.
//!
//! These are small, realistic fragments of documentation code: an HTTP
//! callback with undeclared names and a hanging bracket, a one-liner using
//! an undeclared string, and a README pair where the second block relies on
//! a declaration that only exists in the first.

/// HTTP GET with a callback. `http` and `url` are undeclared and the final
/// `};` line has no matching opening brace.
pub const HTTP_CALLBACK_SNIPPET: &str = r#"http.get(url, function(res) {
    var data = '';
    res.on('data',function(chunk){data+= chunk;});
    res.on('end',function(){
        console.log("BODY: " + data);})
}).on('error', function(e) {
    console.log("Got error: " + e.message);});
};
"#;

/// Splitting an undeclared string variable.
pub const STRING_SPLIT_SNIPPET: &str = "var words = s.split(\" \");\n";

/// First README block of a prompt-style package: declares `prompt` via
/// `require` and uses callbacks. Should check clean.
pub const PROMPT_CALLBACK_SNIPPET: &str = r#"var prompt = require('prompt');

prompt.start();
prompt.get(['username', 'email'], function (err, result) {
    console.log('Command-line input received:')
    console.log('  username: ' + result.username)
    console.log('  email: ' + result.email)});
"#;

/// Second README block of the same package: `prompt` is undeclared here and
/// `await` appears at the top level of a script.
pub const PROMPT_AWAIT_SNIPPET: &str =
    "const {username, email} = await prompt.get(['username', 'email']);\n";

/// A README holding both prompt snippets in fenced js blocks, for the
/// markdown extraction path.
pub const PROMPT_README: &str = r#"# prompt

A beautiful command-line prompt.

## Usage

Using callbacks:

```js
var prompt = require('prompt');

prompt.start();
prompt.get(['username', 'email'], function (err, result) {
    console.log('Command-line input received:')
    console.log('  username: ' + result.username)
    console.log('  email: ' + result.email)});
```

Or with `await`:

```js
const {username, email} = await prompt.get(['username', 'email']);
```

Install it:

```sh
npm install prompt
```
"#;

/// All four example snippets, paired with stable ids.
pub fn example_snippets() -> Vec<(&'static str, &'static str)> {
    vec![
        ("http-callback", HTTP_CALLBACK_SNIPPET),
        ("string-split", STRING_SPLIT_SNIPPET),
        ("prompt-callback", PROMPT_CALLBACK_SNIPPET),
        ("prompt-await", PROMPT_AWAIT_SNIPPET),
    ]
}

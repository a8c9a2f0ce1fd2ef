#include <findel/parser.hpp>

#include <charconv>
#include <ostream>
#include <sstream>

namespace findel {
namespace {
	enum class token_kind
	{
		identifier,
		number,
		lparen,
		rparen,
		comma,
		end,
		invalid,
	};

	std::string describe (token_kind kind)
	{
		switch (kind)
		{
			case token_kind::identifier:
				return "identifier";
			case token_kind::number:
				return "number";
			case token_kind::lparen:
				return "'('";
			case token_kind::rparen:
				return "')'";
			case token_kind::comma:
				return "','";
			case token_kind::end:
				return "end of input";
			case token_kind::invalid:
				return "invalid character";
		}
		return "?";
	}

	struct token
	{
		token_kind kind{ token_kind::end };
		std::string text;
		std::size_t line = 1;
		std::size_t column = 1;
	};

	class lexer
	{
	public:
		explicit lexer (std::string_view text) :
			text_ (text)
		{
		}

		token next ()
		{
			skip_whitespace ();
			token tok;
			tok.line = line_;
			tok.column = column_;
			if (pos_ >= text_.size ())
			{
				tok.kind = token_kind::end;
				return tok;
			}
			char ch = text_[pos_];
			if (ch == '(')
			{
				tok.kind = token_kind::lparen;
				tok.text = "(";
				advance ();
			}
			else if (ch == ')')
			{
				tok.kind = token_kind::rparen;
				tok.text = ")";
				advance ();
			}
			else if (ch == ',')
			{
				tok.kind = token_kind::comma;
				tok.text = ",";
				advance ();
			}
			else if (ch >= '0' && ch <= '9')
			{
				tok.kind = token_kind::number;
				while (pos_ < text_.size () && text_[pos_] >= '0' && text_[pos_] <= '9')
				{
					tok.text.push_back (text_[pos_]);
					advance ();
				}
			}
			else if (is_ident_start (ch))
			{
				tok.kind = token_kind::identifier;
				while (pos_ < text_.size () && is_ident_char (text_[pos_]))
				{
					tok.text.push_back (text_[pos_]);
					advance ();
				}
			}
			else
			{
				tok.kind = token_kind::invalid;
				tok.text = std::string (1, ch);
				advance ();
			}
			return tok;
		}

	private:
		static bool is_ident_start (char ch)
		{
			return (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z') || ch == '_';
		}

		static bool is_ident_char (char ch)
		{
			return is_ident_start (ch) || (ch >= '0' && ch <= '9');
		}

		void skip_whitespace ()
		{
			while (pos_ < text_.size ())
			{
				char ch = text_[pos_];
				if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n')
				{
					advance ();
				}
				else
				{
					break;
				}
			}
		}

		void advance ()
		{
			if (text_[pos_] == '\n')
			{
				++line_;
				column_ = 1;
			}
			else
			{
				++column_;
			}
			++pos_;
		}

		std::string_view text_;
		std::size_t pos_ = 0;
		std::size_t line_ = 1;
		std::size_t column_ = 1;
	};

	class parser
	{
	public:
		parser (std::string_view text, delta d) :
			lexer_ (text),
			delta_ (d)
		{
			current_ = lexer_.next ();
		}

		parse_result run ()
		{
			parse_result result;
			auto tree = parse_expr ();
			if (!tree)
			{
				result.error = std::move (error_);
				return result;
			}
			if (current_.kind != token_kind::end)
			{
				fail ("trailing input after expression", { describe (token_kind::end) });
				result.error = std::move (error_);
				return result;
			}
			result.tree = std::move (tree);
			return result;
		}

	private:
		// Deep nesting is rejected instead of recursing off the stack. The
		// cap leaves room for instrumented builds with fat stack frames.
		static constexpr std::size_t max_nesting = 512;

		struct depth_guard
		{
			std::size_t & depth;

			explicit depth_guard (std::size_t & depth_a) :
				depth (depth_a)
			{
				++depth;
			}

			~depth_guard ()
			{
				--depth;
			}
		};

		primitive_ptr parse_expr ()
		{
			depth_guard guard (depth_);
			if (depth_ > max_nesting)
			{
				fail ("expression nesting exceeds " + std::to_string (max_nesting) + " levels", {});
				return nullptr;
			}
			if (current_.kind != token_kind::identifier)
			{
				fail ("expected a primitive", { "Zero", "One", "Scale", "ScaleObs", "Give", "And", "Or", "If", "Timebound", "At", "Before", "After" });
				return nullptr;
			}
			auto name = current_.text;
			consume ();
			if (name == "Zero")
			{
				return prim::zero ();
			}
			if (name == "One")
			{
				return parse_one ();
			}
			if (name == "Scale")
			{
				return parse_scale ();
			}
			if (name == "ScaleObs")
			{
				return parse_scale_obs ();
			}
			if (name == "Give")
			{
				if (!expect (token_kind::lparen))
				{
					return nullptr;
				}
				auto sub = parse_expr ();
				if (!sub || !expect (token_kind::rparen))
				{
					return nullptr;
				}
				return prim::give (std::move (sub));
			}
			if (name == "And" || name == "Or")
			{
				if (!expect (token_kind::lparen))
				{
					return nullptr;
				}
				auto left = parse_expr ();
				if (!left || !expect (token_kind::comma))
				{
					return nullptr;
				}
				auto right = parse_expr ();
				if (!right || !expect (token_kind::rparen))
				{
					return nullptr;
				}
				return name == "And" ? prim::and_ (std::move (left), std::move (right)) : prim::or_ (std::move (left), std::move (right));
			}
			if (name == "If")
			{
				return parse_if ();
			}
			if (name == "Timebound")
			{
				return parse_timebound ();
			}
			if (name == "At" || name == "Before" || name == "After")
			{
				return parse_sugar (name);
			}
			fail ("unknown primitive '" + name + "'", { "Zero", "One", "Scale", "ScaleObs", "Give", "And", "Or", "If", "Timebound", "At", "Before", "After" });
			return nullptr;
		}

		primitive_ptr parse_one ()
		{
			if (!expect (token_kind::lparen))
			{
				return nullptr;
			}
			if (current_.kind != token_kind::identifier || !valid_currency (current_.text))
			{
				fail ("expected a currency (1-8 uppercase letters)", { "currency" });
				return nullptr;
			}
			currency cur (current_.text);
			consume ();
			if (!expect (token_kind::rparen))
			{
				return nullptr;
			}
			return prim::one (std::move (cur));
		}

		primitive_ptr parse_scale ()
		{
			if (!expect (token_kind::lparen))
			{
				return nullptr;
			}
			nat factor;
			if (!parse_nat (factor))
			{
				return nullptr;
			}
			if (!expect (token_kind::comma))
			{
				return nullptr;
			}
			auto sub = parse_expr ();
			if (!sub || !expect (token_kind::rparen))
			{
				return nullptr;
			}
			return prim::scale (std::move (factor), std::move (sub));
		}

		primitive_ptr parse_scale_obs ()
		{
			if (!expect (token_kind::lparen))
			{
				return nullptr;
			}
			address source;
			if (!parse_address (source))
			{
				return nullptr;
			}
			if (!expect (token_kind::comma))
			{
				return nullptr;
			}
			auto sub = parse_expr ();
			if (!sub || !expect (token_kind::rparen))
			{
				return nullptr;
			}
			return prim::scale_obs (std::move (source), std::move (sub));
		}

		primitive_ptr parse_if ()
		{
			if (!expect (token_kind::lparen))
			{
				return nullptr;
			}
			address source;
			if (!parse_address (source))
			{
				return nullptr;
			}
			if (!expect (token_kind::comma))
			{
				return nullptr;
			}
			auto then_branch = parse_expr ();
			if (!then_branch || !expect (token_kind::comma))
			{
				return nullptr;
			}
			auto else_branch = parse_expr ();
			if (!else_branch || !expect (token_kind::rparen))
			{
				return nullptr;
			}
			return prim::if_ (std::move (source), std::move (then_branch), std::move (else_branch));
		}

		primitive_ptr parse_timebound ()
		{
			if (!expect (token_kind::lparen))
			{
				return nullptr;
			}
			timestamp t0;
			if (!parse_timestamp (t0) || !expect (token_kind::comma))
			{
				return nullptr;
			}
			timestamp t1;
			if (!parse_timestamp (t1) || !expect (token_kind::comma))
			{
				return nullptr;
			}
			auto sub = parse_expr ();
			if (!sub || !expect (token_kind::rparen))
			{
				return nullptr;
			}
			return prim::timebound (t0, t1, std::move (sub));
		}

		primitive_ptr parse_sugar (const std::string & name)
		{
			if (!expect (token_kind::lparen))
			{
				return nullptr;
			}
			timestamp t;
			if (!parse_timestamp (t) || !expect (token_kind::comma))
			{
				return nullptr;
			}
			auto sub = parse_expr ();
			if (!sub || !expect (token_kind::rparen))
			{
				return nullptr;
			}
			if (name == "At")
			{
				return at (t, std::move (sub), delta_);
			}
			if (name == "Before")
			{
				return before (t, std::move (sub));
			}
			return after (t, std::move (sub));
		}

		bool parse_nat (nat & out)
		{
			if (current_.kind != token_kind::number)
			{
				fail ("expected a natural number", { describe (token_kind::number) });
				return false;
			}
			out = nat (current_.text, 10);
			consume ();
			return true;
		}

		bool parse_timestamp (timestamp & out)
		{
			if (current_.kind != token_kind::number)
			{
				fail ("expected a timestamp", { describe (token_kind::number) });
				return false;
			}
			const auto & text = current_.text;
			auto [ptr, ec] = std::from_chars (text.data (), text.data () + text.size (), out);
			if (ec != std::errc{} || ptr != text.data () + text.size ())
			{
				fail ("timestamp literal out of range", { describe (token_kind::number) });
				return false;
			}
			consume ();
			return true;
		}

		bool parse_address (address & out)
		{
			if (current_.kind != token_kind::identifier)
			{
				fail ("expected an address", { describe (token_kind::identifier) });
				return false;
			}
			out = address (current_.text);
			consume ();
			return true;
		}

		bool expect (token_kind kind)
		{
			if (current_.kind != kind)
			{
				fail (std::string ("expected ") + std::string (describe (kind)), { std::string (describe (kind)) });
				return false;
			}
			consume ();
			return true;
		}

		void consume ()
		{
			current_ = lexer_.next ();
		}

		void fail (std::string message, std::vector<std::string> expected)
		{
			// Keep the first error; later ones are cascades.
			if (!error_)
			{
				parse_error err;
				err.line = current_.line;
				err.column = current_.column;
				err.message = std::move (message);
				if (current_.kind != token_kind::end)
				{
					err.message += ", found '" + current_.text + "'";
				}
				err.expected = std::move (expected);
				error_ = std::move (err);
			}
		}

		lexer lexer_;
		delta delta_;
		token current_;
		std::size_t depth_ = 0;
		std::optional<parse_error> error_;
	};
}

std::string parse_error::to_string () const
{
	std::ostringstream os;
	os << line << ":" << column << ": " << message;
	if (!expected.empty ())
	{
		os << " (expected ";
		for (std::size_t i = 0; i < expected.size (); ++i)
		{
			if (i > 0)
			{
				os << (i + 1 == expected.size () ? " or " : ", ");
			}
			os << expected[i];
		}
		os << ")";
	}
	return os.str ();
}

parse_result parse (std::string_view text, delta d)
{
	return parser (text, d).run ();
}

namespace
{
	void print_walk (const primitive & node, std::string & out)
	{
		out += to_string (node.kind);
		switch (node.kind)
		{
			case prim_kind::zero:
				break;
			case prim_kind::one:
				out += "(" + node.cur.symbol + ")";
				break;
			case prim_kind::scale:
				out += "(" + node.factor.get_str () + ", ";
				print_walk (*node.left, out);
				out += ")";
				break;
			case prim_kind::scale_obs:
				out += "(" + node.source.value + ", ";
				print_walk (*node.left, out);
				out += ")";
				break;
			case prim_kind::give:
				out += "(";
				print_walk (*node.left, out);
				out += ")";
				break;
			case prim_kind::and_:
			case prim_kind::or_:
				out += "(";
				print_walk (*node.left, out);
				out += ", ";
				print_walk (*node.right, out);
				out += ")";
				break;
			case prim_kind::if_:
				out += "(" + node.source.value + ", ";
				print_walk (*node.left, out);
				out += ", ";
				print_walk (*node.right, out);
				out += ")";
				break;
			case prim_kind::timebound:
				out += "(" + std::to_string (node.t0) + ", " + std::to_string (node.t1) + ", ";
				print_walk (*node.left, out);
				out += ")";
				break;
		}
	}
}

std::string pretty_print (const primitive & tree)
{
	std::string out;
	print_walk (tree, out);
	return out;
}

std::string pretty_print (const primitive_ptr & tree)
{
	if (!tree)
	{
		return "<null>";
	}
	return pretty_print (*tree);
}

std::ostream & operator<< (std::ostream & os, const primitive & tree)
{
	return os << pretty_print (tree);
}
}
